"""Machine-checking of Lie point symmetry claims for u_tx = g(t,x) u_x + f(t,x,u)
and u_tx = f(t,x,u)."""

__version__ = "0.1.0"
