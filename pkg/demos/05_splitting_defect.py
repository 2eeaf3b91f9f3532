"""How far is the directional split from unsplit ETD2RK after one step?

Replacing phi_l of a Kronecker sum by a product of directional phi_l's is
exact only to second order, so the one-step gap should shrink like tau^3.
The dense comparison assembles the full 144 x 144 operator of a 12 x 12 grid.

Smooth data show the asymptotic rate at once. White-noise data excite grid
modes so stiff that tau * lambda is large, and the rate appears only at
smaller tau.
"""
from adrexp import get_model, initial_condition, splitting_study, without_reaction

model = get_model("schnakenberg2d")
grid = model.grid(12)
taus = [1e-3, 5e-4, 2.5e-4]


def show(title, rows, slope):
    print(f"\n{title}: fitted slope {slope:.2f}")
    for r in rows:
        loc = "" if r.local_slope is None else f"{r.local_slope:5.2f}"
        flag = "" if r.asymptotic else "  (not asymptotic)"
        print(f"  tau={r.tau:.2e}  defect={r.defect:.3e}  {loc}{flag}")


show("smooth cosine perturbation", *splitting_study(model, grid, taus))
show("model noise", *splitting_study(model, grid, taus,
                                     initial=initial_condition(model, grid)))
show("model noise, smaller steps", *splitting_study(
    model, grid, [1e-5, 5e-6, 2.5e-6], initial=initial_condition(model, grid)))

# %% without reaction the gap does not vanish in 2-D: phi_1(a) phi_1(b) (a + b)
# differs from e^{a+b} - 1 in the cubic term, so the split is not exact there either
show("pure diffusion", *splitting_study(without_reaction(model), grid, taus))
