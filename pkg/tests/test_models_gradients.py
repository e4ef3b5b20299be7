"""Central finite-difference checks of the analytic gradients used by the
pairwise-ranking and translational trainers."""

import numpy as np
import pytest

from kgrec.models.bpr import pairwise_loss_and_grad
from kgrec.models.trans import hyperplane_pair_loss, translation_pair_loss

H = 1e-6
REL_TOL = 1e-4


def central_diff(f, vecs, which, idx):
    plus = [v.copy() for v in vecs]
    minus = [v.copy() for v in vecs]
    plus[which][idx] += H
    minus[which][idx] -= H
    return (f(plus) - f(minus)) / (2 * H)


def check_gradients(f_loss, f_grads, vecs, rel_tol=REL_TOL):
    grads = f_grads(vecs)
    for which, grad in enumerate(grads):
        for idx in range(len(vecs[which])):
            fd = central_diff(f_loss, vecs, which, idx)
            an = grad[idx]
            denom = max(abs(fd), abs(an), 1.0)
            assert abs(fd - an) / denom <= rel_tol, (which, idx, fd, an)


def test_bpr_gradients_match_finite_differences():
    rng = np.random.default_rng(0)
    d = 6
    reg = 0.01
    for _ in range(50):
        vecs = [rng.normal(0, 1, d) for _ in range(3)]
        loss_fn = lambda v: pairwise_loss_and_grad(*v, reg)[0]
        grad_fn = lambda v: pairwise_loss_and_grad(*v, reg)[1]
        check_gradients(loss_fn, grad_fn, vecs)


def _active_margin_point(rng, d, make_vecs, loss_of):
    """Rejection-sample a parameter point where the margin is active and not
    within FD distance of the hinge kink."""
    while True:
        vecs = make_vecs(rng, d)
        if loss_of(vecs) > 1e-3:
            return vecs


def test_transe_gradients_match_finite_differences():
    rng = np.random.default_rng(1)
    d = 6
    margin = 1.0
    loss_fn = lambda v: translation_pair_loss(*v, margin)[0]
    grad_fn = lambda v: translation_pair_loss(*v, margin)[1]
    make = lambda rng, d: [rng.normal(0, 1, d) for _ in range(5)]
    for _ in range(50):
        vecs = _active_margin_point(rng, d, make, loss_fn)
        check_gradients(loss_fn, grad_fn, vecs)


def test_transe_inactive_margin_zero_gradients():
    d = 4
    h = np.zeros(d)
    r = np.zeros(d)
    t = np.zeros(d)
    hn = np.full(d, 10.0)
    tn = np.zeros(d)
    loss, grads = translation_pair_loss(h, r, t, hn, tn, 1.0)
    assert loss == 0.0
    for g in grads:
        assert not g.any()


def test_transh_gradients_match_finite_differences():
    rng = np.random.default_rng(2)
    d = 6
    margin = 1.0
    loss_fn = lambda v: hyperplane_pair_loss(*v, margin)[0]
    grad_fn = lambda v: hyperplane_pair_loss(*v, margin)[1]

    def make(rng, d):
        vecs = [rng.normal(0, 1, d) for _ in range(5)]
        w = rng.normal(0, 1, d)
        # the loss is defined for any w; no need to normalize at the test point
        return vecs + [w]

    for _ in range(50):
        vecs = _active_margin_point(rng, d, make, loss_fn)
        check_gradients(loss_fn, grad_fn, vecs)


def test_translation_identity_distance_zero():
    d = 5
    h = np.ones(d)
    loss, _ = translation_pair_loss(h, np.zeros(d), h, h, np.full(d, 3.0), margin=1.0)
    # positive distance 0, negative distance > 1 -> hinge inactive
    assert loss == 0.0


def test_hyperplane_orthogonal_reduces_to_translation():
    # w orthogonal to h and t leaves both projections untouched
    h = np.array([1.0, 2.0, 0.0])
    t = np.array([0.5, -1.0, 0.0])
    r = np.array([0.1, 0.2, 0.0])
    hn = np.array([2.0, 1.0, 0.0])
    tn = np.array([-1.0, 0.5, 0.0])
    w = np.array([0.0, 0.0, 1.0])
    plain, _ = translation_pair_loss(h, r, t, hn, tn, 1.0)
    hyper, _ = hyperplane_pair_loss(h, r, t, hn, tn, w, 1.0)
    assert hyper == pytest.approx(plain, abs=1e-12)


def test_projection_idempotent():
    rng = np.random.default_rng(3)
    w = rng.normal(0, 1, 8)
    w /= np.linalg.norm(w)
    x = rng.normal(0, 1, 8)
    proj = lambda v: v - (w @ v) * w
    once = proj(x)
    twice = proj(once)
    assert np.abs(once - twice).max() < 1e-12
