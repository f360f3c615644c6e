import json

import numpy as np
import pytest
import scipy.sparse as sp

from qsumm.errors import DimensionMismatch, InvalidHyperparameter, SingleClassTraining
from qsumm.ingest import QuestionRecord
from qsumm.models import (
    Hyperparams,
    LinearModel,
    assemble_features,
    class_weights_for,
    decision_score,
    eps_insensitive_loss,
    eps_insensitive_subgradient,
    feature_dim,
    hinge_loss,
    hinge_subgradient,
    objective,
    train_svm,
    train_svr,
)
from qsumm.textproc import make_sentence
from qsumm.vectorspace import fit_vocabulary


def separable(n=500, seed=0, margin=0.1):
    rng = np.random.default_rng(seed)
    w_true = np.array([1.0, -2.0])
    X = rng.uniform(-1, 1, size=(4 * n, 2))
    m = X @ w_true + 0.1
    X = X[np.abs(m) > margin][:n]
    y = (X @ w_true + 0.1 > 0).astype(int)
    return X, y


def line(n=200, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1, 1, n)
    return x[:, None], 0.5 * x


# --- training -----------------------------------------------------------

def test_svm_separable_full_accuracy():
    X, y = separable()
    assert len(y) == 500
    model = train_svm(X, y, Hyperparams(lam=1e-4, epochs=50))
    pred = decision_score(model, X) > 0
    assert np.all(pred == (y == 1))


def test_svr_fits_line_on_heldout_grid():
    x, y = line()
    model = train_svr(x, y, Hyperparams(lam=1e-3, epsilon=0.01, epochs=50))
    grid = np.linspace(-1, 1, 41)
    assert np.max(np.abs(decision_score(model, grid[:, None]) - 0.5 * grid)) <= 0.05


def test_svr_constant_targets():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(100, 3))
    model = train_svr(X, np.full(100, 0.4), Hyperparams(lam=1e-2, epsilon=0.05, epochs=30))
    assert np.max(np.abs(decision_score(model, X) - 0.4)) <= 0.05
    assert model.objective < 1e-4


def test_objective_not_above_initial_and_retained_monotone():
    X, y = separable(200, seed=3)
    m = train_svm(X, y, Hyperparams(lam=1e-3, epochs=10))
    assert m.objective <= m.initial_objective
    r = m.retained_objectives
    assert all(b <= a + 1e-12 for a, b in zip(r, r[1:]))
    assert m.objective == pytest.approx(r[-1])
    x, t = line()
    m = train_svr(x, t, Hyperparams(lam=1e-3, epsilon=0.01, epochs=10))
    assert m.objective <= m.initial_objective
    assert len(m.epoch_objectives) == 10


def test_returned_weights_achieve_reported_objective():
    X, y = separable(200, seed=4)
    m = train_svm(X, y, Hyperparams(lam=1e-3, epochs=5))
    s = 2.0 * y - 1.0
    sw = np.where(y == 1, m.class_weights[1], m.class_weights[0])
    got = objective("SVM", m.weights, m.bias, sp.csr_matrix(X), s, 1e-3, 0.0, sw)
    assert got == pytest.approx(m.objective, rel=1e-9)


def test_flipped_labels_negate_scores():
    X, y = separable(300, seed=5)
    hp = Hyperparams(lam=1e-3, epochs=30, class_weight="none")
    a = train_svm(X, y, hp)
    b = train_svm(X, 1 - y, hp)
    assert np.max(np.abs(decision_score(a, X) + decision_score(b, X))) < 1e-3


def test_seeded_determinism():
    X, y = separable(200, seed=6)
    a = train_svm(X, y, Hyperparams(lam=1e-3, epochs=5, seed=9))
    b = train_svm(X, y, Hyperparams(lam=1e-3, epochs=5, seed=9))
    assert np.array_equal(a.weights, b.weights) and a.bias == b.bias


def test_sparse_and_dense_inputs_agree():
    X, y = separable(200, seed=7)
    hp = Hyperparams(lam=1e-3, epochs=5)
    a = train_svm(X, y, hp)
    b = train_svm(sp.csr_matrix(X), y, hp)
    assert np.allclose(a.weights, b.weights) and a.bias == pytest.approx(b.bias)


def test_class_weights_balanced():
    cw = class_weights_for([0, 0, 0, 1])
    assert cw == {0: 4 / 6, 1: 2.0}
    assert class_weights_for([0, 1], "none") == {0: 1.0, 1: 1.0}


# --- errors -------------------------------------------------------------

def test_single_class_rejected():
    with pytest.raises(SingleClassTraining):
        train_svm(np.eye(3), [1, 1, 1])


def test_non_binary_labels_rejected():
    with pytest.raises(ValueError):
        train_svm(np.eye(3), [0, 1, 2])


@pytest.mark.parametrize("hp", [
    Hyperparams(lam=0.0), Hyperparams(lam=-1), Hyperparams(epochs=0),
    Hyperparams(epsilon=-0.1), Hyperparams(t0=-1), Hyperparams(class_weight="odd"),
])
def test_invalid_hyperparameters(hp):
    with pytest.raises(InvalidHyperparameter):
        if hp.epsilon < 0:
            train_svr(np.eye(2), [0.0, 1.0], hp)
        else:
            train_svm(np.eye(2), [0, 1], hp)


def test_row_target_mismatch():
    with pytest.raises(DimensionMismatch):
        train_svr(np.eye(3), [0.1, 0.2])


def test_decision_score_dimension_mismatch():
    m = train_svm(np.eye(2), [0, 1], Hyperparams(epochs=2))
    with pytest.raises(DimensionMismatch):
        decision_score(m, np.ones(3))
    with pytest.raises(DimensionMismatch):
        decision_score(m, sp.csr_matrix(np.ones((1, 3))))


def test_decision_score_shapes():
    m = LinearModel("SVR", np.array([1.0, 2.0]), 0.5, Hyperparams())
    assert decision_score(m, np.array([1.0, 1.0])) == 3.5
    assert isinstance(decision_score(m, sp.csr_matrix([[1.0, 1.0]])), float)
    batch = decision_score(m, np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert list(batch) == [1.5, 2.5]
    rows = sp.csr_matrix([[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]])
    assert list(decision_score(m, rows)) == [decision_score(m, rows[i]) for i in range(3)]


# --- losses and subgradients --------------------------------------------

def test_loss_examples():
    assert hinge_loss(0.0, 1) == 1.0
    assert hinge_loss(2.0, 1) == 0.0
    assert hinge_loss(2.0, -1) == 3.0
    assert eps_insensitive_loss(0.5, 0.5, 0.1) == 0.0
    assert eps_insensitive_loss(1.0, 0.5, 0.1) == pytest.approx(0.4)


def test_subgradients_match_central_differences():
    rng = np.random.default_rng(42)
    h = 1e-7
    checked = 0
    while checked < 50:
        score = float(rng.uniform(-3, 3))
        s = float(rng.choice([-1.0, 1.0]))
        y = float(rng.uniform(-1, 1))
        eps = float(rng.uniform(0, 0.5))
        # keep clear of the kinks where the derivative is undefined
        if abs(1 - s * score) < 1e-3 or abs(abs(score - y) - eps) < 1e-3:
            continue
        fd = (hinge_loss(score + h, s) - hinge_loss(score - h, s)) / (2 * h)
        assert abs(fd - hinge_subgradient(score, s)) <= 1e-5
        fd = (eps_insensitive_loss(score + h, y, eps) - eps_insensitive_loss(score - h, y, eps)) / (2 * h)
        assert abs(fd - eps_insensitive_subgradient(score, y, eps)) <= 1e-5
        checked += 1


# --- features -----------------------------------------------------------

def test_assemble_features_layout():
    q = QuestionRecord(
        id="q", body="role of gene cancer",
        sentences=[make_sentence(0, "Gene drives cancer."), make_sentence(1, "Unrelated words here.")],
    )
    vocab = fit_vocabulary([s.stems for s in q.sentences] + [q.query_stems])
    X = assemble_features(q, vocab)
    assert X.shape == (2, feature_dim(vocab))
    last = X[:, len(vocab)].toarray().ravel()
    assert last[0] > 0.5 and last[1] == 0.0
    block = X[:, : len(vocab)].toarray()
    assert np.allclose(np.linalg.norm(block, axis=1), 1.0)


# --- persistence --------------------------------------------------------

def test_model_json_roundtrip(tmp_path):
    X, y = separable(100, seed=8)
    m = train_svm(X, y, Hyperparams(lam=1e-3, epochs=3), vocab_hash="abc123")
    p = tmp_path / "model.json"
    m.save(p)
    d = json.loads(p.read_text())
    assert d["format_version"] == 1 and d["kind"] == "SVM"
    r = LinearModel.load(p)
    assert np.array_equal(r.weights, m.weights)
    assert r.bias == m.bias and r.vocab_hash == "abc123"
    assert r.hyperparams == m.hyperparams
    assert r.class_weights == m.class_weights
