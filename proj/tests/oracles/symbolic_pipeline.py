"""Independent symbolic oracle for the nonholonomic reduction recipe.

Computes, with sympy and without any of the C++ code, the constraint
manifold, omega_M, the horizontal space, the cotangent-lifted generators,
the horizontal annihilator U, the corrections spanning R, and the reduced
structure on a quotient chart.  Values printed here are frozen into the
C++ regression tests.
"""
import sympy as sp


def kernel_basis(mat):
    return [sp.simplify(v) for v in mat.nullspace(simplify=True)]


class System:
    def __init__(self, q, metric, constraints, eliminate):
        self.q = list(q)
        d = len(q)
        self.d = d
        self.P = sp.symbols(' '.join('P_' + str(v) for v in q), real=True)
        g = sp.Matrix(metric)
        phi = sp.Matrix(constraints)
        A = phi * g.inv()
        p = sp.Matrix(self.P)
        elim = [self.q.index(e) for e in eliminate]
        free = [i for i in range(d) if i not in elim]
        sol = sp.solve(list(A * p), [self.P[i] for i in elim], dict=True)[0]
        self.m = self.q + [self.P[i] for i in free]
        self.emb = self.q + [sp.simplify(sol.get(self.P[i], self.P[i])) for i in range(d)]
        self.phi = phi
        n = len(self.m)
        self.n = n
        Jq = sp.Matrix([[sp.diff(e, v) for v in self.m] for e in self.emb[:d]])
        Jp = sp.Matrix([[sp.diff(e, v) for v in self.m] for e in self.emb[d:]])
        self.W = sp.simplify(Jq.T * Jp - Jp.T * Jq)
        self.beta = [sp.Matrix([phi[j, :] * Jq[:, a] for a in range(n)]).T for j in range(phi.shape[0])]
        self.Hb = kernel_basis(sp.Matrix.vstack(*self.beta))

    def lift(self, gen):
        d = self.d
        ps = sp.Matrix(self.emb[d:])
        comp = list(gen)
        for name in self.m[d:]:
            j = list(self.P).index(name)
            comp.append(sp.simplify(-sum(ps[i] * sp.diff(gen[i], self.q[j]) for i in range(d))))
        return sp.Matrix(comp)

    def momentum(self, gen):
        return sp.simplify(sum(self.emb[self.d + i] * gen[i] for i in range(self.d)))


def analyse(sys_, gens, proj, slice_, red):
    sub = dict(zip(sys_.m, slice_))
    xi = [sys_.lift(g).subs(sub) for g in gens]
    V = sp.Matrix.hstack(*xi)
    n = sys_.n
    W = sys_.W.subs(sub)
    beta = [b.subs(sub) for b in sys_.beta]
    Hmat = sp.Matrix.hstack(*kernel_basis(sp.Matrix.vstack(*beta)))
    # V cap H: coefficients c with beta(V c) = 0
    B = sp.Matrix.vstack(*beta)
    cs = kernel_basis(B * V)
    VH = [sp.simplify(V * c) for c in cs]
    # U = (V cap H)^omega cap H
    if VH:
        M = sp.Matrix([[ (w.T * W * Hmat[:, i])[0] for i in range(Hmat.shape[1])] for w in VH])
        U = [sp.simplify(Hmat * b) for b in kernel_basis(M)]
    else:
        U = [Hmat[:, i] for i in range(Hmat.shape[1])]
    # D cap K^perp via corrections
    cols = []
    for u in U:
        cols.append(sp.Matrix([(u.T * W * xi_i)[0] for xi_i in xi]))
    Bcols = [sp.Matrix([(b * xi_i)[0] for xi_i in xi]) for b in beta]
    big = sp.Matrix.hstack(*(cols + Bcols))
    ker = kernel_basis(big)
    sections = []
    R = []
    for kv in ker:
        X = sp.zeros(n, 1)
        a = sp.zeros(1, n)
        for i, u in enumerate(U):
            X += kv[i] * u
            a += kv[i] * (u.T * W)
        corr = sp.zeros(1, n)
        for j, b in enumerate(beta):
            corr += kv[len(U) + j] * b
        a += corr
        sections.append((sp.simplify(X), sp.simplify(a)))
        R.append(sp.simplify(corr))
    # push to the quotient chart at the slice
    Jpi = sp.Matrix([[sp.diff(f, v) for v in sys_.m] for f in proj])
    Jsig = sp.Matrix([[sp.diff(f, v) for v in red] for f in slice_])
    out = []
    for X, a in sections:
        Xb = sp.simplify((Jpi * X).subs(sub))
        ab = sp.simplify(a * Jsig.subs(sub))
        out.append((list(Xb), list(ab)))
    return dict(VH=VH, U=U, sections=sections, R=R, reduced=out, xi=xi)


def show(title, res):
    print('==', title)
    print('V cap H:', [list(v) for v in res['VH']])
    print('U:', [list(u) for u in res['U']])
    print('R:', [list(r) for r in res['R']])
    for X, a in res['reduced']:
        print('  reduced section:', X, a)


if __name__ == '__main__':
    th, x, y, s, mm, ph, Jr = sp.symbols('theta x y s m phi J', positive=True)
    # skate, metric completed by the constraint form so that it is invertible
    phi1 = [0, sp.sin(th), -sp.cos(th)]
    g = sp.Matrix([[mm * s**2, -mm * s * sp.sin(th), mm * s * sp.cos(th)],
                   [-mm * s * sp.sin(th), mm, 0],
                   [mm * s * sp.cos(th), 0, mm]]) + mm * sp.Matrix(phi1) * sp.Matrix(phi1).T
    sk = System([th, x, y], g, [phi1], [th])
    print('skate embedding', sk.emb)
    print('skate omega', sk.W)
    u, w = sp.symbols('u w', real=True)
    Pth, Px, Py = sk.P
    proj = [Px * sp.cos(th) + Py * sp.sin(th), Py * sp.cos(th) - Px * sp.sin(th)]
    res = analyse(sk, [[1, -y, x], [0, 1, 0], [0, 0, 1]], proj, [0, 0, 0, u, w], [u, w])
    show('skate SE2 (lifted)', res)
    print('momenta', [sk.momentum(gq) for gq in [[1, -y, x], [0, 1, 0], [0, 0, 1]]])
    # rotor skate
    phi2 = [0, 0, sp.sin(th), -sp.cos(th)]
    g2 = sp.Matrix([[Jr, Jr, 0, 0],
                    [Jr, Jr + mm * s**2, -mm * s * sp.sin(th), mm * s * sp.cos(th)],
                    [0, -mm * s * sp.sin(th), mm, 0],
                    [0, mm * s * sp.cos(th), 0, mm]]) + mm * sp.Matrix(phi2) * sp.Matrix(phi2).T
    rk = System([ph, th, x, y], g2, [phi2], [th])
    print('rotor embedding', rk.emb)
    Pph, Pth2, Px2, Py2 = rk.P
    proj2 = [Pph, Px2 * sp.cos(th) + Py2 * sp.sin(th), Py2 * sp.cos(th) - Px2 * sp.sin(th)]
    a_ = sp.symbols('a', real=True)
    res2 = analyse(rk, [[1, 0, 0, 0], [0, 1, -y, x], [0, 0, 1, 0], [0, 0, 0, 1]], proj2,
                   [0, 0, 0, 0, a_, u, w], [a_, u, w])
    show('rotor S1xSE2 (lifted)', res2)
