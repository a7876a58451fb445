"""Shared dual-ascent core for the two margin subproblems.

After the rank-one metric substitution both subproblems take the form

    min_{v, c}   0.5 ||v||^2 + penalty * sum_t max(0, 1 + tau_t * (v.z_t - c[cut_t]))
    subject to   c[j] <= c[j+1] along each declared chain of cuts,

where each hinge term t carries a feature row ``z_t``, an orientation
``tau_t`` (+1 pushes the score below its cut by the unit margin, -1 pushes
it above) and the index of the cut it references.  The gender classifier is
the special case of a single cut (the negated bias) and no chain.

The box-constrained dual is ascended with pairwise SMO steps that preserve
the per-cut balance constraints ``sum_{t in cut} tau_t beta_t = 0``; each
sweep applies one second-order-selected pair per tie block.  Order
constraints between cuts are handled by an active-set loop over tie
patterns: neighbouring cuts whose unconstrained optima cross are merged
into one block, and blocks whose internal multipliers turn negative are
split again.  Cut values are recovered from the exact one-dimensional
piecewise-linear minimization given the current v, which keeps the reported
primal value a true upper bound for the duality-gap stopping test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence

_BOUND_SLACK = 1e-10


def rank1_shrink(anchor, lam3):
    """Return f(X) = M^{-1/2} X for M = I + 2*lam3*anchor*anchor^T.

    The map is symmetric, so it both whitens features (z = f(x)) and maps the
    whitened weight back (w = f(v)).  With a zero anchor or lam3 = 0 it is the
    identity.
    """
    if anchor is None or lam3 == 0.0:
        return lambda X: np.asarray(X, dtype=float)
    anchor = np.asarray(anchor, dtype=float)
    aa = float(anchor @ anchor)
    if aa == 0.0:
        return lambda X: np.asarray(X, dtype=float)
    q = (1.0 / np.sqrt(1.0 + 2.0 * lam3 * aa) - 1.0) / aa

    def apply(X):
        X = np.asarray(X, dtype=float)
        proj = X @ anchor
        return X + np.multiply.outer(proj, q * anchor) if X.ndim > 1 else X + (q * proj) * anchor

    return apply


@dataclass
class HingeProblem:
    """One instance of the reduced subproblem (features already whitened)."""

    z: np.ndarray          # (T, d) feature rows
    tau: np.ndarray        # (T,) orientations, +-1
    cut: np.ndarray        # (T,) cut index per term
    n_cuts: int
    chains: tuple          # ordered tuples of cut ids that must stay sorted
    penalty: float


@dataclass
class HingeSolution:
    v: np.ndarray
    cuts: np.ndarray
    objective: float       # primal value in the whitened coordinates
    gap: float
    steps: int
    beta: np.ndarray       # dual state in the original term order, for warm starts


def _huber_warm_start(prob, mu_min=1e-6):
    """Near-optimal dual point from a smoothed-Newton solve of the primal.

    The primal lives in only dim + n_cuts variables, so Newton steps on a
    Huber-smoothed hinge (path-following the smoothing width down) reach the
    optimum basin in a few dozen cheap iterations.  The Huber gradient
    weights are box- and balance-feasible duals, which hands the exact dual
    ascent a starting point with an already tiny gap.  Duals are extracted
    at the deepest smoothing level whose gradient actually converged, since
    conditioning eventually defeats the Newton solves.
    """
    z = np.asarray(prob.z, dtype=float)
    tau = np.asarray(prob.tau, dtype=float)
    cut = np.asarray(prob.cut, dtype=int)
    lam = float(prob.penalty)
    T, d = z.shape
    n_cuts = prob.n_cuts
    ridge = 1e-8  # keeps one-sided cuts finite; duals are refined afterwards
    theta = np.zeros(d + n_cuts)
    best_beta = np.zeros(T)

    def pieces(th):
        v, c = th[:d], th[d:]
        r = 1.0 + tau * (z @ v - c[cut])
        w = np.clip(r / mu, 0.0, 1.0)
        loss = np.where(r >= mu, r - 0.5 * mu, 0.5 * np.clip(r, 0.0, None) ** 2 / mu)
        value = 0.5 * v @ v + lam * loss.sum() + 0.5 * ridge * c @ c
        return r, w, value

    mu = 1.0
    while mu >= mu_min * 0.99:
        converged = False
        for _ in range(60):
            v, c = theta[:d], theta[d:]
            r, w, value = pieces(theta)
            tw = tau * w
            grad = np.concatenate([v + lam * (z.T @ tw), -lam * np.bincount(cut, tw, n_cuts) + ridge * c])
            if np.linalg.norm(grad) <= 1e-8 * max(1.0, lam * np.sqrt(T)):
                converged = True
                break
            quad_zone = (r > 0.0) & (r < mu)
            h = np.zeros((d + n_cuts, d + n_cuts))
            h[:d, :d] = np.eye(d)
            h[d:, d:] = ridge * np.eye(n_cuts)
            if quad_zone.any():
                zq = z[quad_zone]
                cq = cut[quad_zone]
                coef = lam / mu
                h[:d, :d] += coef * zq.T @ zq
                cross = np.zeros((d, n_cuts))
                for j in range(n_cuts):
                    sel = cq == j
                    if sel.any():
                        cross[:, j] = -zq[sel].sum(axis=0)
                        h[d + j, d + j] += coef * sel.sum()
                h[:d, d:] += coef * cross
                h[d:, :d] += coef * cross.T
            try:
                step = np.linalg.solve(h, -grad)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(h, -grad, rcond=None)[0]
            slope = float(grad @ step)
            if slope > 0:
                step, slope = -grad, -float(grad @ grad)
            t = 1.0
            floor = 1e-14 * max(1.0, abs(value))  # Armijo can drown in roundoff
            for _ in range(60):
                trial = theta + t * step
                if pieces(trial)[2] <= value + 0.25 * t * slope + floor:
                    theta = trial
                    break
                t *= 0.5
            else:
                break
        if not converged:
            break
        r, w, _ = pieces(theta)
        best_beta = lam * w
        mu *= 0.1
    return best_beta


def _contiguous_partitions(length):
    """All partitions of range(length) into contiguous blocks."""
    if length == 0:
        return [[]]
    out = []
    for mask in range(1 << (length - 1)):
        blocks, start = [], 0
        for pos in range(length - 1):
            if mask >> pos & 1:
                blocks.append(list(range(start, pos + 1)))
                start = pos + 1
        blocks.append(list(range(start, length)))
        out.append(blocks)
    return out


class _DualSolver:
    def __init__(self, prob: HingeProblem, fixed_blocks=None, warm=None):
        self.prob = prob
        self.lam = float(prob.penalty)
        self.T = prob.z.shape[0]
        self.fixed = fixed_blocks is not None
        if fixed_blocks is not None:
            self.blocks = [sorted(b) for b in fixed_blocks]
        else:
            self.blocks = [[j] for j in range(prob.n_cuts)]
        self._beta_orig = np.zeros(self.T) if warm is None else np.array(warm, dtype=float)
        self.steps = 0
        self._layout()

    # ------------------------------------------------------------------ setup

    def _layout(self):
        """Physically sort the terms so every tie block is one contiguous slice."""
        block_of_cut = np.empty(self.prob.n_cuts, dtype=int)
        for bi, blk in enumerate(self.blocks):
            for j in blk:
                block_of_cut[j] = bi
        cut = np.asarray(self.prob.cut, dtype=int)
        self.perm = np.argsort(block_of_cut[cut], kind="stable") if self.T else np.empty(0, int)
        self.z = np.ascontiguousarray(np.asarray(self.prob.z, dtype=float)[self.perm])
        self.tau = np.asarray(self.prob.tau, dtype=float)[self.perm]
        self.cut = cut[self.perm]
        self.beta = self._beta_orig[self.perm].copy()
        np.clip(self.beta, 0.0, self.lam, out=self.beta)
        self.znorm = np.einsum("ij,ij->i", self.z, self.z)
        counts = np.bincount(block_of_cut[self.cut], minlength=len(self.blocks))
        ends = np.cumsum(counts)
        self.slices = [slice(int(e - c), int(e)) for c, e in zip(counts, ends)]
        self.block_id = np.empty(self.T, dtype=int)
        for bi, sl in enumerate(self.slices):
            self.block_id[sl] = bi
        self._restore_balance()
        self._refresh()

    def _restore_balance(self):
        """Project the warm-start duals back onto the balance constraints."""
        for sl in self.slices:
            t = self.tau[sl]
            b = self.beta[sl]
            resid = float(t @ b)
            if resid == 0.0:
                continue
            side = t * np.sign(resid) > 0
            mass = b[side].sum()
            if mass >= abs(resid) and mass > 0:
                b[side] -= b[side] * (abs(resid) / mass)
            else:
                b[:] = 0.0
            self.beta[sl] = b

    def _refresh(self):
        self.v = -(self.z.T @ (self.tau * self.beta))
        self.s = self.z @ self.v

    def _sync_original(self):
        self._beta_orig[self.perm] = self.beta

    # -------------------------------------------------------------- SMO sweeps

    def _sweep(self, eps):
        """One pass over the blocks, applying up to one pair update each.

        Returns the largest KKT violation seen across the blocks.
        """
        lam, tau, beta, z = self.lam, self.tau, self.beta, self.z
        tiny = _BOUND_SLACK * max(1.0, lam)
        worst = 0.0
        for sl in self.slices:
            if sl.stop == sl.start:
                continue
            tb = tau[sl]
            bb = beta[sl]
            m = tb + self.s[sl]
            up = np.where(tb > 0, bb < lam - tiny, bb > tiny)
            lo = np.where(tb > 0, bb > tiny, bb < lam - tiny)
            if not up.any() or not lo.any():
                continue
            i_loc = int(np.argmax(np.where(up, m, -np.inf)))
            m_i = m[i_loc]
            m_lo = np.where(lo, m, np.inf)
            viol = m_i - float(m_lo.min())
            worst = max(worst, viol)
            if viol <= eps:
                continue
            i = sl.start + i_loc
            zi = z[i]
            quad_all = np.maximum(self.znorm[sl] + self.znorm[i] - 2.0 * (z[sl] @ zi), 1e-12)
            gain = np.where(lo & (m < m_i), (m_i - m) ** 2 / quad_all, -np.inf)
            j_loc = int(np.argmax(gain))
            j = sl.start + j_loc
            diff = m_i - m[j_loc]
            h_i = (lam - beta[i]) if tau[i] > 0 else beta[i]
            h_j = beta[j] if tau[j] > 0 else (lam - beta[j])
            h = min(h_i, h_j)
            quad = quad_all[j_loc]
            if quad > 1e-12:
                h = min(h, diff / quad)
            if h <= 0.0:
                continue
            beta[i] = min(max(beta[i] + tau[i] * h, 0.0), lam)
            beta[j] = min(max(beta[j] - tau[j] * h, 0.0), lam)
            dv = -h * (z[i] - z[j])
            self.v += dv
            self.s += z @ dv
            self.steps += 1
        return worst

    def _smo(self, eps, max_steps):
        sweeps = 0
        while self.steps < max_steps:
            worst = self._sweep(eps)
            sweeps += 1
            if worst <= eps:
                return True
            if sweeps % 4 == 0:
                self._projected_ascent()
            if sweeps % 64 == 0:
                self._polish()
            if sweeps % 512 == 0:
                self._refresh()  # guard against drift in the running sums
        return False

    def _projected_ascent(self, rounds=8):
        """One steepest-ascent step over all duals jointly.

        Pairwise exchanges move two coordinates at a time and crawl badly on
        degenerate data (duplicated rows make many exchanges equivalent).
        Projecting the dual gradient onto the balance equalities and the
        active box faces yields a direction that restructures every block at
        once; the exact line maximum along it is closed-form.
        """
        lam = self.lam
        tiny = _BOUND_SLACK * max(1.0, lam)
        grad = self.tau + self.s  # tau_t * dD/dbeta_t ... times tau later
        grad = grad * self.tau    # dD/dbeta_t = 1 + tau_t s_t
        active = np.ones(self.T, dtype=bool)
        p = None
        for _ in range(rounds):
            p = np.where(active, grad, 0.0)
            for sl in self.slices:
                mask = active[sl]
                n_act = int(mask.sum())
                if n_act == 0:
                    continue
                t_sl = self.tau[sl]
                excess = float((t_sl * p[sl])[mask].sum()) / n_act
                p[sl] = np.where(mask, p[sl] - excess * t_sl, 0.0)
            outward = ((self.beta <= tiny) & (p < 0)) | ((self.beta >= lam - tiny) & (p > 0))
            outward &= active
            if not outward.any():
                break
            active &= ~outward
        slope = float(grad @ p)
        pnorm = float(np.abs(p).max(initial=0.0))
        if p is None or pnorm <= 0 or slope <= 1e-14 * max(1.0, lam):
            return False
        gp = self.z.T @ (self.tau * p)
        curv = float(gp @ gp)
        t_star = slope / curv if curv > 1e-300 else np.inf
        moving = np.abs(p) > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            room = np.where(p > 0, (lam - self.beta) / p, np.where(p < 0, -self.beta / p, np.inf))
        t_max = float(np.min(np.where(moving, room, np.inf), initial=np.inf))
        t = min(t_star, t_max)
        if not np.isfinite(t) or t <= 0:
            return False
        np.clip(self.beta + t * p, 0.0, lam, out=self.beta)
        self.v -= t * gp
        self.s -= t * (self.z @ gp)
        self.steps += 1
        return True

    # ----------------------------------------------------- Newton face polish

    def _working_set(self, tiny, recruit):
        """Free duals plus the worst bound-sitting KKT violators.

        Pairwise sweeps move bound duals only two at a time, which crawls
        when many blocks couple through v; recruiting the violators into the
        face solve lets one Newton step restructure the bounds jointly.
        """
        free_mask = (self.beta > tiny) & (self.beta < self.lam - tiny)
        idx = [np.flatnonzero(free_mask)]
        if recruit > 0:
            m = self.tau + self.s
            scores = np.full(self.T, -np.inf)
            for sl in self.slices:
                fm = free_mask[sl]
                if not fm.any():
                    continue
                mb = m[sl]
                nu = 0.5 * (mb[fm].max() + mb[fm].min())
                at_zero = ~fm & (self.beta[sl] <= tiny)
                at_lam = ~fm & (self.beta[sl] >= self.lam - tiny)
                sc = np.where(at_zero, mb - nu, np.where(at_lam, nu - mb, -np.inf))
                scores[sl] = sc
            order = np.argsort(scores)[::-1][:recruit]
            idx.append(order[scores[order] > 1e-12])
        out = np.unique(np.concatenate(idx))
        return out

    def _polish(self, max_rounds=60, cap=600, recruit=48):
        """Maximize the dual over the working set with a null-space Newton.

        SMO identifies the active box structure; the working set (free duals
        plus KKT-violating bound duals) is optimized jointly subject to the
        block balances.  The reduced Hessian has rank at most the feature
        dimension, so the face can be unbounded: the consistent part of the
        Newton system is solved by least squares and any leftover linear
        ascent ray is ridden to the box.  Variables blocking a step are
        ejected from the working set instead of killing the step.
        """
        lam = self.lam
        tiny = _BOUND_SLACK * max(1.0, lam)
        banned = np.zeros(self.T, dtype=bool)
        for round_no in range(max_rounds):
            work = self._working_set(tiny, recruit if round_no == 0 else 0)
            work = work[~banned[work]]
            f = work.size
            if f == 0 or f > cap:
                return
            tau_w = self.tau[work]
            grad = 1.0 + tau_w * self.s[work]  # dD/dbeta over the working set
            blocks_here = np.unique(self.block_id[work])
            c_mat = np.zeros((blocks_here.size, f))
            for row, bi in enumerate(blocks_here):
                c_mat[row, self.block_id[work] == bi] = tau_w[self.block_id[work] == bi]
            # orthonormal basis of the balance null space
            _, sv, vt = np.linalg.svd(c_mat, full_matrices=True)
            rank = int(np.sum(sv > 1e-12 * max(1.0, sv[0] if sv.size else 1.0)))
            nb = vt[rank:].T
            if nb.shape[1] == 0:
                return
            gn = nb.T @ grad
            g_rows = tau_w[:, None] * self.z[work]
            gn_mat = g_rows.T @ nb            # d x (f - rank)
            h = gn_mat.T @ gn_mat
            y = np.linalg.lstsq(h, gn, rcond=None)[0]
            ray = gn - h @ y
            ray_norm = float(np.linalg.norm(ray))
            if ray_norm > 1e-9 * max(1.0, float(np.linalg.norm(gn))):
                step = nb @ ray               # linear ascent direction, curvature ~ 0
                unbounded = True
            else:
                step = nb @ y                 # Newton displacement on the face
                unbounded = False
            size = float(np.abs(step).max(initial=0.0))
            if size <= 1e-13 * max(1.0, lam):
                return
            with np.errstate(divide="ignore", invalid="ignore"):
                room = np.where(step > 1e-300, (lam - self.beta[work]) / step,
                                np.where(step < -1e-300, -self.beta[work] / step, np.inf))
            blocked = room <= 1e-12
            if blocked.any():
                banned[work[blocked]] = True  # pinned against the box; retry without them
                continue
            alpha_max = float(np.min(room, initial=np.inf))
            if unbounded:
                if not np.isfinite(alpha_max):
                    return  # genuinely unbounded; cannot happen with a bounded box
                alpha = alpha_max
            else:
                alpha = min(1.0, alpha_max)
            before = self._dual()
            saved = self.beta[work].copy()
            self.beta[work] = np.clip(self.beta[work] + alpha * step, 0.0, lam)
            self._refresh()
            self.steps += 1
            if self._dual() < before - 1e-9 * max(1.0, abs(before)):
                self.beta[work] = saved
                self._refresh()
                return
            if not unbounded and alpha >= 1.0:
                return

    # ------------------------------------------------------- cut-value recovery

    def _block_interval(self, sl):
        """Flat optimal interval of one block's cut value given the current v."""
        if sl.stop == sl.start:
            return None
        t = self.tau[sl]
        sc = self.s[sl]
        bps = np.sort(np.where(t > 0, 1.0 + sc, sc - 1.0))
        n_up = int(np.sum(t > 0))
        if n_up == 0:
            return (-np.inf, bps[0])
        if n_up == bps.size:
            return (bps[-1], np.inf)
        return (bps[n_up - 1], bps[n_up])

    @staticmethod
    def _pick(interval):
        lo, hi = interval
        if np.isinf(lo) and np.isinf(hi):
            return 0.0
        if np.isinf(lo):
            return float(hi)
        if np.isinf(hi):
            return float(lo)
        return 0.5 * (lo + hi)

    def _recover_cuts(self):
        values = np.full(self.prob.n_cuts, np.nan)
        for blk, sl in zip(self.blocks, self.slices):
            interval = self._block_interval(sl)
            if interval is None:
                continue
            val = self._pick(interval)
            for j in blk:
                values[j] = val
        # cuts with no terms at all: interpolate along their chain
        for chain in self.prob.chains:
            vals = values[list(chain)]
            if np.isnan(vals).all():
                vals[:] = 0.0
            else:
                known = np.flatnonzero(~np.isnan(vals))
                missing = np.flatnonzero(np.isnan(vals))
                if missing.size:
                    vals[missing] = np.interp(missing, known, vals[known])
            values[list(chain)] = vals
        values[np.isnan(values)] = 0.0
        # final hygiene clamp; the tie loop keeps real violations out of here
        for chain in self.prob.chains:
            run = values[list(chain)]
            values[list(chain)] = np.maximum.accumulate(run)
        return values

    def _primal(self, cuts):
        margins = 1.0 + self.tau * (self.s - cuts[self.cut])
        return 0.5 * float(self.v @ self.v) + self.lam * float(np.clip(margins, 0.0, None).sum())

    def _dual(self):
        return float(self.beta.sum()) - 0.5 * float(self.v @ self.v)

    # --------------------------------------------------------- tie adjustments

    def _adjust_ties(self, mtol, stol):
        """One merge-or-split round; returns True when the structure changed."""
        if self.fixed or not self.prob.chains:
            return False
        block_of = {}
        for bi, blk in enumerate(self.blocks):
            for j in blk:
                block_of[j] = bi
        values = {
            bi: (None if (iv := self._block_interval(sl)) is None else self._pick(iv))
            for bi, sl in enumerate(self.slices)
        }
        merged = False
        new_blocks = {bi: list(blk) for bi, blk in enumerate(self.blocks)}
        for chain in self.prob.chains:
            seq = []
            for j in chain:
                bi = block_of[j]
                if not seq or seq[-1] != bi:
                    seq.append(bi)
            for a, b in zip(seq, seq[1:]):
                if a not in new_blocks or b not in new_blocks:
                    continue
                va, vb = values.get(a), values.get(b)
                if va is None or vb is None:
                    continue
                if va > vb + mtol:
                    new_blocks[a] = new_blocks[a] + new_blocks[b]
                    values[a] = None  # merged blocks get re-solved before reuse
                    del new_blocks[b]
                    merged = True
        if merged:
            self._sync_original()
            self.blocks = [sorted(blk) for blk in new_blocks.values()]
            self._layout()
            return True
        # split blocks whose internal order multipliers went negative
        signed = self.tau * self.beta
        r = np.zeros(self.prob.n_cuts)
        np.add.at(r, self.cut, signed)
        for bi, blk in enumerate(self.blocks):
            if len(blk) < 2:
                continue
            partial = np.cumsum(r[blk[:-1]])
            worst = int(np.argmin(partial))
            if partial[worst] < -stol:
                left, right = blk[: worst + 1], blk[worst + 1:]
                # duals of a split block are no longer balance-feasible
                self.beta[self.slices[bi]] = 0.0
                self._sync_original()
                self.blocks[bi] = left
                self.blocks.append(right)
                self._layout()
                return True
        return False

    # ---------------------------------------------------------------- driver

    def solve(self, tol, max_steps):
        if self.lam <= 0.0 or self.T == 0:
            self.beta[:] = 0.0
            self._refresh()
            cuts = self._recover_cuts()
            self._sync_original()
            return HingeSolution(self.v, cuts, self._primal(cuts), 0.0, 0, self._beta_orig)
        eps = 1e-3
        mtol = 1e-8
        stol = 1e-7 * max(1.0, self.lam)
        for _ in range(64 * max(1, self.prob.n_cuts)):
            self._smo(eps, max_steps)
            self._polish()
            if self._adjust_ties(mtol, stol):
                continue
            self._refresh()
            cuts = self._recover_cuts()
            primal = self._primal(cuts)
            gap = primal - self._dual()
            if gap <= tol * (1.0 + abs(primal)):
                self._sync_original()
                return HingeSolution(self.v, cuts, primal, gap, self.steps, self._beta_orig)
            if self.steps >= max_steps or eps <= 1e-12:
                raise NonConvergence(self.steps, gap=gap)
            eps *= 1e-2
        raise NonConvergence(self.steps)


def solve_hinge_dual(prob, tol=1e-6, max_steps=None, fixed_blocks=None, warm=None):
    """Minimize the reduced subproblem; returns a :class:`HingeSolution`.

    ``warm`` seeds the dual variables from a previous solve on the same term
    layout.  ``fixed_blocks`` pins the tie pattern (used by the exhaustive
    fallback); normally the active-set loop discovers it.  Raises
    :class:`NonConvergence` when the duality gap cannot be closed within the
    step budget.
    """
    if max_steps is None:
        max_steps = default_budget(prob.z.shape)
    if prob.z.shape[0] > 96 and prob.penalty > 0.0:
        # a caller-provided warm start can be arbitrarily stale after the
        # anchor moved; keep whichever dual point certifies the highest value
        # (the zero vector is a safe floor)
        candidates = [_huber_warm_start(prob), None]
        if warm is not None:
            candidates.append(warm)
        solvers = [_DualSolver(prob, fixed_blocks=fixed_blocks, warm=c) for c in candidates]
        solver = max(solvers, key=lambda s: s._dual())
    else:
        solver = _DualSolver(prob, fixed_blocks=fixed_blocks, warm=warm)
    try:
        return solver.solve(tol, max_steps)
    except NonConvergence:
        if fixed_blocks is not None or not _small_enough(prob):
            raise
    return _enumerate_tie_patterns(prob, tol, max_steps)


def default_budget(shape):
    return max(200_000, 50 * shape[0] * max(shape[1], 1))


def _small_enough(prob):
    return prob.z.shape[0] <= 80 and all(len(c) <= 5 for c in prob.chains)


def _enumerate_tie_patterns(prob, tol, max_steps):
    """Brute-force fallback over tie patterns for tiny adversarial instances."""
    per_chain = [_contiguous_partitions(len(chain)) for chain in prob.chains]

    def expand(parts):
        blocks = []
        covered = set()
        for chain, part in zip(prob.chains, parts):
            for blk in part:
                blocks.append([chain[i] for i in blk])
                covered.update(chain[i] for i in blk)
        for j in range(prob.n_cuts):
            if j not in covered:
                blocks.append([j])
        return blocks

    stack = [[]]
    for options in per_chain:
        stack = [prefix + [opt] for prefix in stack for opt in options]
    best = None
    for parts in stack:
        try:
            sol = _DualSolver(prob, fixed_blocks=expand(parts)).solve(tol, max_steps)
        except NonConvergence:
            continue
        ordered = all(
            np.all(np.diff(sol.cuts[list(chain)]) >= -1e-8) for chain in prob.chains
        )
        if ordered and (best is None or sol.objective < best.objective):
            best = sol
    if best is None:
        raise NonConvergence(max_steps)
    return best
