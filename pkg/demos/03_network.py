# %% [markdown]
# # The network: forward pass, backpropagation, one SGD step
#
# A small tanh MLP with an identity output.  All parameters live in one flat
# vector; weights and biases are views into it.

# %%
import numpy as np

from cann import mlp

net = mlp.init_random([3, 6, 6, 1], seed=0)
print("parameters:", net.flat.size, " first layer W:", net.weights[0].shape)

# %% [markdown]
# Gradients are checked against central differences.

# %%
x = np.array([0.2, -0.1, 0.4])
g = mlp.backward(net, x, 1.0).flat
fd = np.empty_like(g)
h = 1e-6
for k in range(g.size):
    keep = net.flat[k]
    net.flat[k] = keep + h
    up = mlp.forward(net, x)
    net.flat[k] = keep - h
    fd[k] = (up - mlp.forward(net, x)) / (2 * h)
    net.flat[k] = keep
print("max |analytic - finite difference|:", np.abs(g - fd).max())

# %% [markdown]
# One SGD step on the squared loss (y - 1)^2 moves the output towards 1.

# %%
before = mlp.forward(net, x)
grad = mlp.backward(net, x, 2.0 * (before - 1.0))
mlp.sgd_step(net, grad, 0.05)
print(f"output {before:.4f} -> {mlp.forward(net, x):.4f}")
