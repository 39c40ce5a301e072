import json
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from stresskit import classify
from stresskit.classify import (
    CorruptFile,
    DimensionMismatch,
    LogisticHyper,
    LogisticModel,
    SingleClassCorpus,
    SvmHyper,
    VersionMismatch,
    decision_value,
    load_model,
    logistic_gradient,
    logistic_objective,
    predict,
    predict_nb,
    predict_proba,
    save_model,
    sigmoid,
    train_logistic,
    train_naive_bayes,
    train_svm,
)
from stresskit.features import Vocabulary, fit_vocabulary, vectorize_bow


def small_vocab(n=2) -> Vocabulary:
    letters = "abcdefghij"[:n]
    return Vocabulary(tokens=tuple(letters), doc_freq=(1,) * n, n_docs=1)


SEPARABLE = [({0: 1.0}, 1), ({1: 1.0}, 0), ({0: 2.0}, 1), ({1: 2.0}, 0)]


# ---------------------------------------------------------------- logistic

def test_zero_epochs_gives_uninformative_model():
    model = train_logistic(SEPARABLE, LogisticHyper(epochs=0), vocabulary=small_vocab())
    assert model.bias == 0.0
    assert not model.coef.any()
    for x in ({}, {0: 3.0}, {1: 100.0}):
        assert predict_proba(model, x) == 0.5


def test_separable_toy_reaches_perfect_training_accuracy():
    model = train_logistic(SEPARABLE, vocabulary=small_vocab())
    for x, label in SEPARABLE:
        assert predict(model, x).label == label


def test_single_class_rejected():
    with pytest.raises(SingleClassCorpus):
        train_logistic([({0: 1.0}, 1), ({1: 1.0}, 1)], vocabulary=small_vocab())


def test_predict_proba_analytic_points():
    vocab = small_vocab(1)
    zero = LogisticModel(0.0, np.zeros(1), vocab, "", LogisticHyper())
    assert predict_proba(zero, {0: 123.0}) == 0.5
    unit = LogisticModel(0.0, np.array([1.0]), vocab, "", LogisticHyper())
    assert math.isclose(predict_proba(unit, {0: math.log(3)}), 0.75, abs_tol=1e-12)
    saturated = LogisticModel(50.0, np.zeros(1), vocab, "", LogisticHyper())
    assert predict_proba(saturated, {}) >= 1 - 1e-9


def test_decision_rule_tie_goes_to_stressed():
    vocab = small_vocab(1)
    model = LogisticModel(0.0, np.zeros(1), vocab, "", LogisticHyper())
    assert predict(model, {}).label == 1  # probability exactly 0.5
    low = LogisticModel(-0.1, np.zeros(1), vocab, "", LogisticHyper())
    assert predict(low, {}).label == 0
    high = LogisticModel(0.1, np.zeros(1), vocab, "", LogisticHyper())
    assert predict(high, {}).label == 1


def test_dimension_mismatch():
    model = train_logistic(SEPARABLE, LogisticHyper(epochs=1), vocabulary=small_vocab())
    with pytest.raises(DimensionMismatch):
        predict_proba(model, {7: 1.0})
    with pytest.raises(DimensionMismatch):
        train_logistic([({5: 1.0}, 1), ({0: 1.0}, 0)], vocabulary=small_vocab())


def test_loss_trajectory_non_increasing():
    rng = np.random.default_rng(0)
    examples = [
        ({i: float(v) for i, v in enumerate(rng.integers(0, 4, size=5)) if v}, int(lab))
        for lab in rng.integers(0, 2, size=30)
    ]
    examples[0] = (examples[0][0], 1)
    examples[1] = (examples[1][0], 0)
    vocab = small_vocab(5)
    hyper = LogisticHyper(learning_rate=5.0, epochs=40)  # forces halvings
    model = train_logistic(examples, hyper, vocabulary=vocab)
    assert model.effective_learning_rate < 5.0
    X, y = classify._assemble(examples, 5)
    lr = model.effective_learning_rate
    bias, coef = 0.0, np.zeros(5)
    losses = [logistic_objective(bias, coef, X, y, hyper.l2)]
    for _ in range(hyper.epochs):
        gb, gw = logistic_gradient(bias, coef, X, y, hyper.l2)
        bias -= lr * gb
        coef -= lr * gw
        losses.append(logistic_objective(bias, coef, X, y, hyper.l2))
    assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    for _ in range(5):
        n, V = 8, 5
        examples = []
        for k in range(n):
            vec = {i: float(v) for i, v in enumerate(rng.integers(0, 3, size=V)) if v}
            examples.append((vec, int(k % 2)))
        X, y = classify._assemble(examples, V)
        bias = float(rng.normal())
        coef = rng.normal(size=V)
        l2 = 1e-3
        gb, gw = logistic_gradient(bias, coef, X, y, l2)
        h = 1e-5
        fd_b = (
            logistic_objective(bias + h, coef, X, y, l2)
            - logistic_objective(bias - h, coef, X, y, l2)
        ) / (2 * h)
        assert abs(gb - fd_b) / max(1.0, abs(gb)) < 1e-6
        for i in range(V):
            bump = np.zeros(V)
            bump[i] = h
            fd = (
                logistic_objective(bias, coef + bump, X, y, l2)
                - logistic_objective(bias, coef - bump, X, y, l2)
            ) / (2 * h)
            assert abs(gw[i] - fd) / max(1.0, abs(gw[i])) < 1e-6


def test_training_deterministic():
    a = train_logistic(SEPARABLE, vocabulary=small_vocab())
    b = train_logistic(SEPARABLE, vocabulary=small_vocab())
    assert a.bias == b.bias
    assert np.array_equal(a.coef, b.coef)


@given(st.floats(min_value=-30, max_value=30), st.floats(min_value=-3, max_value=3))
def test_probability_complement_under_negated_parameters(bias, x):
    vocab = small_vocab(1)
    model = LogisticModel(bias, np.array([1.3]), vocab, "", LogisticHyper())
    negated = LogisticModel(-bias, np.array([-1.3]), vocab, "", LogisticHyper())
    assert abs(predict_proba(model, {0: x}) + predict_proba(negated, {0: x}) - 1.0) < 1e-12


@given(st.floats(min_value=-700, max_value=700))
def test_sigmoid_symmetry(z):
    assert abs(sigmoid(-z) - (1.0 - sigmoid(z))) < 1e-12


# ------------------------------------------------------------- naive bayes

HAND_CORPUS = ["a a", "a b", "a", "b b", "b a", "b"]
HAND_LABELS = [0, 0, 0, 1, 1, 1]


def hand_nb():
    vocab = fit_vocabulary(HAND_CORPUS)
    pairs = [(vectorize_bow(d, vocab), y) for d, y in zip(HAND_CORPUS, HAND_LABELS)]
    return train_naive_bayes(pairs, 1.0, vocabulary=vocab), vocab


def test_nb_hand_corpus_parameters():
    model, vocab = hand_nb()
    a, b = vocab.index["a"], vocab.index["b"]
    # class 0 token counts: a=4, b=1; alpha=1, V=2 -> P(a|0)=5/7, P(b|0)=2/7
    assert math.isclose(math.exp(model.log_likelihood[0, a]), 5 / 7, abs_tol=1e-12)
    assert math.isclose(math.exp(model.log_likelihood[0, b]), 2 / 7, abs_tol=1e-12)
    assert math.isclose(math.exp(model.log_likelihood[1, a]), 2 / 7, abs_tol=1e-12)
    assert math.isclose(math.exp(model.log_likelihood[1, b]), 5 / 7, abs_tol=1e-12)
    assert math.isclose(math.exp(model.log_prior[0]), 0.5, abs_tol=1e-12)


def test_nb_hand_corpus_posteriors():
    model, vocab = hand_nb()
    a, b = vocab.index["a"], vocab.index["b"]
    cases = [
        ({a: 1.0}, 2 / 7, 0),
        ({b: 1.0}, 5 / 7, 1),
        ({a: 1.0, b: 1.0}, 0.5, 1),      # exact tie classifies stressed
        ({a: 2.0, b: 1.0}, 2 / 7, 0),
    ]
    for x, p_expected, label in cases:
        pred = predict_nb(model, x)
        assert math.isclose(pred.score, p_expected, abs_tol=1e-12)
        assert pred.label == label


def test_nb_empty_vector_uses_priors():
    vocab = small_vocab(1)
    pairs = [({0: 1.0}, 1), ({0: 1.0}, 1), ({0: 1.0}, 0)]
    model = train_naive_bayes(pairs, vocabulary=vocab)
    assert predict_nb(model, {}).label == 1  # majority prior


def test_nb_smoothing_keeps_unseen_tokens_positive():
    vocab = fit_vocabulary(["t u", "u"])
    pairs = [(vectorize_bow("t u", vocab), 1), (vectorize_bow("u", vocab), 0)]
    model = train_naive_bayes(pairs, 1.0, vocabulary=vocab)
    t = vocab.index["t"]
    p1, p0 = math.exp(model.log_likelihood[1, t]), math.exp(model.log_likelihood[0, t])
    assert p1 > p0 > 0


def test_nb_mirrored_corpus_is_symmetric():
    vocab = fit_vocabulary(["a a b", "b b a"])
    pairs = [(vectorize_bow("a a b", vocab), 0), (vectorize_bow("b b a", vocab), 1)]
    model = train_naive_bayes(pairs, vocabulary=vocab)
    a, b = vocab.index["a"], vocab.index["b"]
    assert math.isclose(model.log_prior[0], model.log_prior[1])
    assert math.isclose(model.log_likelihood[0, a], model.log_likelihood[1, b])
    assert math.isclose(model.log_likelihood[0, b], model.log_likelihood[1, a])


def test_nb_likelihoods_are_distributions():
    model, _ = hand_nb()
    for c in (0, 1):
        assert abs(np.exp(model.log_likelihood[c]).sum() - 1.0) < 1e-9


@given(
    st.dictionaries(st.integers(0, 1), st.floats(min_value=0.25, max_value=4.0), max_size=2),
    st.floats(min_value=0.1, max_value=10.0),
)
def test_nb_scaling_counts_preserves_argmax_with_equal_priors(x, scale):
    model, _ = hand_nb()  # equal priors by construction
    delta = classify._nb_log_odds(model, x)
    assume(delta == 0.0 or abs(delta) > 1e-9)  # away from float-blurred ties
    scaled = {i: v * scale for i, v in x.items()}
    assert predict_nb(model, x).label == predict_nb(model, scaled).label


def test_nb_rejects_bad_alpha_and_single_class():
    vocab = small_vocab()
    with pytest.raises(ValueError):
        train_naive_bayes([({0: 1.0}, 1), ({1: 1.0}, 0)], 0.0, vocabulary=vocab)
    with pytest.raises(SingleClassCorpus):
        train_naive_bayes([({0: 1.0}, 1)], vocabulary=vocab)


# -------------------------------------------------------------------- svm

def test_svm_separable_toy_zero_hinge():
    model = train_svm(
        SEPARABLE, SvmHyper(lam=0.05, epochs=6000, seed=3), vocabulary=small_vocab()
    )
    for x, label in SEPARABLE:
        y = 2 * label - 1
        assert y * decision_value(model, x) >= 1 - 1e-3


def test_svm_huge_regularization_shrinks_weights():
    model = train_svm(SEPARABLE, SvmHyper(lam=1e6, epochs=3), vocabulary=small_vocab())
    assert float(np.linalg.norm(model.weights)) < 1e-2


def test_svm_label_flip_negates_decisions():
    hyper = SvmHyper(lam=0.01, epochs=20, seed=11)
    flipped = [(x, 1 - y) for x, y in SEPARABLE]
    a = train_svm(SEPARABLE, hyper, vocabulary=small_vocab())
    b = train_svm(flipped, hyper, vocabulary=small_vocab())
    for x, _ in SEPARABLE + [({0: 3.0, 1: 1.0}, 0)]:
        assert abs(decision_value(a, x) + decision_value(b, x)) < 1e-12


def test_svm_deterministic_given_seed():
    hyper = SvmHyper(lam=0.01, epochs=5, seed=7)
    a = train_svm(SEPARABLE, hyper, vocabulary=small_vocab())
    b = train_svm(SEPARABLE, hyper, vocabulary=small_vocab())
    assert np.array_equal(a.weights, b.weights) and a.bias == b.bias


def test_svm_prediction_margin_rule():
    model = train_svm(SEPARABLE, SvmHyper(lam=0.05, epochs=500, seed=3),
                      vocabulary=small_vocab())
    pred = predict(model, {0: 1.0})
    assert pred.label == 1 and pred.score > 0
    pred = predict(model, {1: 1.0})
    assert pred.label == 0 and pred.score < 0


# ------------------------------------------------------------- persistence

def trained_models():
    vocab = fit_vocabulary(["cat dog", "dog fish", "cat fish"])
    docs = ["cat cat dog", "dog fish", "cat", "fish fish", "dog", "cat fish"]
    labels = [1, 0, 1, 0, 0, 1]
    pairs = [(vectorize_bow(d, vocab), y) for d, y in zip(docs, labels)]
    fp = "fingerprint"
    return [
        train_logistic(pairs, LogisticHyper(epochs=50), vocabulary=vocab, fingerprint=fp),
        train_naive_bayes(pairs, vocabulary=vocab, fingerprint=fp),
        train_svm(pairs, SvmHyper(epochs=5), vocabulary=vocab, fingerprint=fp),
    ]


@pytest.mark.parametrize("model", trained_models(), ids=lambda m: m.kind)
def test_save_load_round_trip_bit_identical(model, tmp_path):
    path = tmp_path / "model.json"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.kind == model.kind
    assert loaded.pipeline_fingerprint == model.pipeline_fingerprint
    assert loaded.vocabulary == model.vocabulary
    rng = np.random.default_rng(5)
    for _ in range(100):
        x = {int(i): float(v) for i, v in enumerate(rng.integers(0, 3, size=3)) if v}
        assert predict(loaded, x).score == predict(model, x).score
        assert predict(loaded, x).label == predict(model, x).label


def test_truncated_file_is_corrupt(tmp_path):
    path = tmp_path / "model.json"
    save_model(trained_models()[0], path)
    path.write_text(path.read_text()[:50], encoding="utf-8")
    with pytest.raises(CorruptFile):
        load_model(path)


def test_version_mismatch(tmp_path):
    path = tmp_path / "model.json"
    save_model(trained_models()[0], path)
    doc = json.loads(path.read_text())
    doc["format_version"] = 2
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(VersionMismatch):
        load_model(path)


def test_current_version_loads(tmp_path):
    path = tmp_path / "model.json"
    save_model(trained_models()[1], path)
    assert load_model(path).kind == "naive_bayes"
