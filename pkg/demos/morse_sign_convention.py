"""Which sign of the linear Morse term is consistent with the Morse superpotential.

The Klein-Gordon-Morse effective potential is usually written as

    U(r) = (S0^2 - V0^2) e^{-2 alpha r} +/- 2 (M S0 + E V0) e^{-alpha r}

and paired with W = a1 - b e^{-alpha r}, b = sqrt(S0^2 - V0^2),
a1 = -alpha/2 + (M S0 + E V0) / b.  Expanding W^2 - W' symbolically shows
that only the minus sign factorizes.  The radial equation produces the minus
sign when the scalar and vector terms are wells, S = -S0 e^{-alpha r} and
V = -V0 e^{-alpha r}, and the plus sign when both are barriers.  Exits non-zero if either expansion disagrees.
"""

import sys

import sympy as sp


def superpotential_expansion():
    """Return (W^2 - W' expanded, U_attractive, U_repulsive, eps0)."""
    r, alpha, S0, V0, M, E = sp.symbols("r alpha S0 V0 M E", positive=True)
    b = sp.sqrt(S0**2 - V0**2)
    c = M * S0 + E * V0
    a1 = -alpha / 2 + c / b
    x = sp.exp(-alpha * r)
    W = a1 - b * x
    v_minus = sp.expand(W**2 - sp.diff(W, r))
    attractive = b**2 * x**2 - 2 * c * x
    repulsive = b**2 * x**2 + 2 * c * x
    return v_minus, attractive, repulsive, a1**2


def radial_equation_potential(sign):
    """U from (E - V)^2 - (M + S)^2 with S = sign S0 x, V = sign V0 x, minus E^2 - M^2."""
    x, S0, V0, M, E = sp.symbols("x S0 V0 M E", positive=True)
    k2 = (E - sign * V0 * x) ** 2 - (M + sign * S0 * x) ** 2
    U = sp.expand(-(k2 - (E**2 - M**2)))
    return U, sp.expand((S0**2 - V0**2) * x**2 + sign * 2 * (M * S0 + E * V0) * x)


def main() -> int:
    v_minus, attractive, repulsive, eps0 = superpotential_expansion()
    d_attr = sp.simplify(v_minus - attractive - eps0)
    d_rep = sp.simplify(v_minus - repulsive - eps0)
    print("W^2 - W' - (b^2 x^2 - 2 c x) - a1^2 =", d_attr)
    print("W^2 - W' - (b^2 x^2 + 2 c x) - a1^2 =", d_rep)
    wells = [sp.simplify(u - want) for u, want in (radial_equation_potential(s) for s in (-1, 1))]
    print("radial U with wells minus (b^2 x^2 - 2 c x) =", wells[0])
    print("radial U with barriers minus (b^2 x^2 + 2 c x) =", wells[1])
    ok = d_attr == 0 and d_rep != 0 and wells == [0, 0]
    print("attractive sign is the consistent one" if ok else "unexpected expansion")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
