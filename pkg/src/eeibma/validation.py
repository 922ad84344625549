"""Self-checks run by ``eeibma validate``."""

import time
from dataclasses import dataclass, replace

import numpy as np

from . import energy as en
from .experiment import run_pipeline
from .predictor import PredictorModel, bce_loss, gradient


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


def numeric_gradient(model, batch, lam, step=1e-5):
    """Central finite differences of ``bce_loss`` for every parameter entry."""
    out = {}
    for key, arr in model.params().items():
        g = np.zeros_like(arr)
        flat, gflat = arr.reshape(-1), g.reshape(-1)
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + step
            up = bce_loss(model, batch, lam)
            flat[k] = orig - step
            down = bce_loss(model, batch, lam)
            flat[k] = orig
            gflat[k] = (up - down) / (2.0 * step)
        out[key] = g
    return out


def gradient_rel_error(analytic, numeric):
    """Largest per-block error, scaled by the block's largest gradient magnitude."""
    worst = 0.0
    for key in analytic:
        a, n = analytic[key], numeric[key]
        scale = max(np.abs(a).max(), np.abs(n).max(), 1e-12)
        worst = max(worst, float(np.abs(a - n).max() / scale))
    return worst


def random_small_problem(rng):
    n = int(rng.integers(1, 4))
    seq = int(rng.integers(1, 5))
    while n * seq > 12:
        seq -= 1
    h = int(rng.integers(1, 6))
    model = PredictorModel(
        w1=rng.normal(0, 0.8, (n * seq, h)), b1=rng.normal(0, 0.3, h),
        w2=rng.normal(0, 0.8, (h, n)), b2=rng.normal(0, 0.3, n),
    )
    b = int(rng.integers(1, 9))
    x = rng.integers(0, 2, (b, n * seq)).astype(float)
    y = rng.integers(0, 2, (b, n)).astype(float)
    return model, list(zip(x, y)), float(rng.choice([0.0, 1e-3, 0.1]))


def check_gradients(n_models=20, seed=0, tol=1e-4):
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(n_models):
        model, batch, lam = random_small_problem(rng)
        worst = max(worst, gradient_rel_error(gradient(model, batch, lam),
                                              numeric_gradient(model, batch, lam)))
    return Check("gradient_check", worst <= tol,
                 f"max rel err {worst:.2e} over {n_models} models ({time.perf_counter() - t0:.2f}s)")


def check_degenerate(cfg):
    scen = replace(cfg.scenario, n_event=2)
    no_check = replace(cfg.radio, p_energycheck=0.0)
    a = en.eatdma_energy(no_check, scen)
    b = en.tdma_energy(no_check, scen)
    ok = a == b
    no_time = replace(cfg.radio, t_echeck=0.0)
    ok &= en.eatdma_energy(no_time, scen) == en.tdma_energy(no_time, scen)
    return Check("eatdma_reduces_to_tdma", ok, f"eatdma={a!r} tdma={b!r}")


def check_frame_scaling(cfg):
    radio = cfg.radio
    s1 = replace(cfg.scenario, n_event=2)
    s2 = replace(s1, n_frames=2 * s1.n_frames)
    nw = 0.5 * s1.capacity
    ok = en.bma_energy(radio, s2, nw) == 2 * en.bma_energy(radio, s1, nw)
    ok &= en.eei_bma_energy(radio, s2, nw) == 2 * en.eei_bma_energy(radio, s1, nw)
    for cap, cfp, total in ((en.tdma_cap, en.tdma_cfp, en.tdma_energy),
                            (en.tdma_cap, en.eatdma_cfp, en.eatdma_energy)):
        c, f = cap(radio, s1), cfp(radio, s1)
        ok &= total(radio, s2) == c + s2.n_frames * f
        ok &= s2.n_frames * f == 2 * (s1.n_frames * f)
    return Check("frame_scaling", ok, "BMA/EEI linear in l, TDMA/EA-TDMA affine with CAP intercept")


def check_monotone(cfg):
    grid = np.linspace(0, cfg.scenario.capacity, 25)
    e = [en.eei_bma_energy(cfg.radio, cfg.scenario, n) for n in grid]
    ok = all(b > a for a, b in zip(e, e[1:]))
    return Check("eei_monotone_in_active", ok, f"{len(grid)} grid points")


def check_pipeline(cfg):
    ev, rep = run_pipeline(cfg)
    act = rep.activation
    ordered = act.n_b <= act.n_t <= act.n_w
    ok = (not ordered) or (rep.e_eei_best <= rep.e_eei_true <= rep.e_eei_poor)
    ok &= rep.eta_true == rep.e_bma / rep.e_eei_true
    ok &= all(v >= 0 for v in rep.energies().values())
    ok &= 0.0 <= ev.p_pred_min <= ev.p_pred_global <= ev.p_pred_max <= 1.0
    return Check("variant_ordering", ok,
                 f"n_b={act.n_b:.3f} n_t={act.n_t:.3f} n_w={act.n_w:.3f}; "
                 f"best={rep.e_eei_best:.5g} true={rep.e_eei_true:.5g} poor={rep.e_eei_poor:.5g} J")


def run_checks(cfg):
    return [
        check_gradients(),
        check_degenerate(cfg),
        check_frame_scaling(cfg),
        check_monotone(cfg),
        check_pipeline(cfg),
    ]
