# %% [markdown]
# # Cell averages, ghost cells and stencils
#
# The scheme never sees point values: its state is the vector of cell
# averages on a uniform mesh.  This script builds the objects everything
# else is made of.

# %%
import math

import numpy as np

from cann.grid import CellAverageField, Grid1D, StencilSpec, cell_averages, stencil_matrix
from cann.problems import get_problem

# %% [markdown]
# A grid on [0, 2π] with 20 cells; cell indices are 1-based, as in the math.

# %%
g = Grid1D(0.0, 2 * math.pi, 20)
print(g.dx, g.left_edge(1), g.right_edge(20))

# %% [markdown]
# Averages are computed with Gauss-Legendre quadrature.  For sin(x) the exact
# average over a cell is (cos a - cos b)/dx, which the rule reproduces to
# round-off.

# %%
avg = cell_averages(math.sin, g)
exact = (np.cos(g.edges[:-1]) - np.cos(g.edges[1:])) / g.dx
print("max quadrature error:", np.abs(avg - exact).max())

# %% [markdown]
# Discontinuous data need the jump location as a break point, otherwise the
# rule smears it.  The shock problem knows its own breakpoints.

# %%
shock = get_problem("burgers-shock")
gs = shock.grid(100)
u0 = shock.initial_averages(gs)
print("cells around x = 0:", u0[15:19])

# %% [markdown]
# A stencil (p, q) takes p cells to the left and q to the right.  With
# periodic boundaries the ghost cells are copies from the other end.

# %%
field = CellAverageField(g, avg)
X = stencil_matrix(field, StencilSpec(2, 1), get_problem("advection-sine").bc)
print(X.shape)
print("row for cell 1 (uses cells 19, 20, 1, 2):", X[0])
print("                                         ", avg[[18, 19, 0, 1]])
