"""From-scratch classifiers over sparse feature vectors: logistic regression
(full-batch gradient descent), multinomial Naive Bayes with Laplace
smoothing, and a linear SVM trained by pegasos-style stochastic subgradient
descent. All trainers are deterministic given their seeds.

Models persist as single self-describing JSON documents; load(save(m))
reproduces predictions bit-identically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix

from .errors import StressKitError
from .features import FeatureVector, Vocabulary

MODEL_FORMAT_VERSION = 1


class SingleClassCorpus(StressKitError):
    pass


class DimensionMismatch(StressKitError):
    pass


class TrainingDiverged(StressKitError):
    pass


class VersionMismatch(StressKitError):
    pass


class CorruptFile(StressKitError):
    pass


@dataclass(frozen=True)
class LogisticHyper:
    learning_rate: float = 0.1
    epochs: int = 500
    l2: float = 1e-4
    seed: int = 42


@dataclass(frozen=True)
class NaiveBayesHyper:
    alpha: float = 1.0


@dataclass(frozen=True)
class SvmHyper:
    lam: float = 1e-4
    epochs: int = 10
    seed: int = 42


@dataclass(frozen=True)
class LogisticModel:
    bias: float
    coef: np.ndarray  # shape (V,)
    vocabulary: Vocabulary
    pipeline_fingerprint: str
    hyper: LogisticHyper
    feature_kind: str = "bow"
    effective_learning_rate: float | None = None

    kind = "logistic"

    def __post_init__(self):
        if len(self.coef) != self.vocabulary.size:
            raise DimensionMismatch(
                f"{len(self.coef)} coefficients for vocabulary of {self.vocabulary.size}"
            )
        if not np.all(np.isfinite(self.coef)) or not math.isfinite(self.bias):
            raise ValueError("non-finite model parameters")


@dataclass(frozen=True)
class NaiveBayesModel:
    log_prior: np.ndarray       # shape (2,)
    log_likelihood: np.ndarray  # shape (2, V)
    vocabulary: Vocabulary
    pipeline_fingerprint: str
    hyper: NaiveBayesHyper
    feature_kind: str = "bow"

    kind = "naive_bayes"


@dataclass(frozen=True)
class SvmModel:
    weights: np.ndarray  # shape (V,)
    bias: float
    vocabulary: Vocabulary
    pipeline_fingerprint: str
    hyper: SvmHyper
    feature_kind: str = "bow"

    kind = "svm"


Model = LogisticModel | NaiveBayesModel | SvmModel


@dataclass(frozen=True)
class Prediction:
    score: float  # probability for logistic/naive bayes, margin for svm
    label: int


def _assemble(
    examples: Sequence[tuple[FeatureVector, int]],
    n_features: int,
) -> tuple[csr_matrix, np.ndarray]:
    data, indices, indptr = [], [], [0]
    labels = []
    for vec, label in examples:
        for i, v in vec.items():
            if not 0 <= i < n_features:
                raise DimensionMismatch(f"feature index {i} outside vocabulary of {n_features}")
            indices.append(i)
            data.append(v)
        indptr.append(len(indices))
        labels.append(label)
    X = csr_matrix(
        (np.asarray(data, dtype=float), indices, indptr),
        shape=(len(examples), n_features),
    )
    y = np.asarray(labels, dtype=float)
    return X, y


def _check_two_classes(y: np.ndarray) -> None:
    if len(y) == 0 or y.min() == y.max():
        raise SingleClassCorpus("training data must contain both classes")


def sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def logistic_objective(bias: float, coef: np.ndarray, X: csr_matrix, y: np.ndarray, l2: float) -> float:
    """Average binary cross-entropy plus (l2/2)*||coef||^2 (bias excluded)."""
    z = X.dot(coef) + bias
    bce = float(np.mean(np.logaddexp(0.0, z) - y * z))
    return bce + 0.5 * l2 * float(coef @ coef)


def logistic_gradient(
    bias: float, coef: np.ndarray, X: csr_matrix, y: np.ndarray, l2: float
) -> tuple[float, np.ndarray]:
    z = X.dot(coef) + bias
    p = 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))
    residual = p - y
    grad_coef = X.T.dot(residual) / len(y) + l2 * coef
    grad_bias = float(np.mean(residual))
    return grad_bias, grad_coef


def train_logistic(
    examples: Sequence[tuple[FeatureVector, int]],
    hyper: LogisticHyper = LogisticHyper(),
    *,
    vocabulary: Vocabulary,
    fingerprint: str = "",
    feature_kind: str = "bow",
) -> LogisticModel:
    """Full-batch gradient descent from zero initialization.

    The training-loss trajectory must be non-increasing; if an epoch raises
    the loss the learning rate is halved and training restarts, up to 8
    halvings, after which TrainingDiverged is raised.
    """
    X, y = _assemble(examples, vocabulary.size)
    _check_two_classes(y)
    lr = hyper.learning_rate
    for _ in range(9):  # initial rate plus up to 8 halvings
        bias = 0.0
        coef = np.zeros(vocabulary.size)
        previous = logistic_objective(bias, coef, X, y, hyper.l2)
        diverged = False
        for _epoch in range(hyper.epochs):
            grad_bias, grad_coef = logistic_gradient(bias, coef, X, y, hyper.l2)
            bias -= lr * grad_bias
            coef -= lr * grad_coef
            loss = logistic_objective(bias, coef, X, y, hyper.l2)
            if loss > previous + 1e-12:
                diverged = True
                break
            previous = loss
        if not diverged:
            return LogisticModel(
                bias=bias,
                coef=coef,
                vocabulary=vocabulary,
                pipeline_fingerprint=fingerprint,
                hyper=hyper,
                feature_kind=feature_kind,
                effective_learning_rate=lr,
            )
        lr /= 2.0
    raise TrainingDiverged("loss still increasing after 8 learning-rate halvings")


def predict_proba(model: LogisticModel, x: FeatureVector) -> float:
    z = model.bias
    coef = model.coef
    size = model.vocabulary.size
    for i, v in x.items():
        if not 0 <= i < size:
            raise DimensionMismatch(f"feature index {i} outside vocabulary of {size}")
        z += coef[i] * v
    return sigmoid(z)


def train_naive_bayes(
    examples: Sequence[tuple[FeatureVector, int]],
    alpha: float = 1.0,
    *,
    vocabulary: Vocabulary,
    fingerprint: str = "",
    feature_kind: str = "bow",
) -> NaiveBayesModel:
    """Multinomial model over token counts with Laplace smoothing alpha."""
    if alpha <= 0:
        raise ValueError("smoothing alpha must be positive")
    X, y = _assemble(examples, vocabulary.size)
    _check_two_classes(y)
    V = vocabulary.size
    log_prior = np.empty(2)
    log_likelihood = np.empty((2, V))
    for c in (0, 1):
        mask = y == c
        log_prior[c] = math.log(mask.sum() / len(y))
        counts = np.asarray(X[mask].sum(axis=0)).ravel()
        log_likelihood[c] = np.log(counts + alpha) - math.log(counts.sum() + alpha * V)
    return NaiveBayesModel(
        log_prior=log_prior,
        log_likelihood=log_likelihood,
        vocabulary=vocabulary,
        pipeline_fingerprint=fingerprint,
        hyper=NaiveBayesHyper(alpha=alpha),
        feature_kind=feature_kind,
    )


def _nb_log_odds(model: NaiveBayesModel, x: FeatureVector) -> float:
    """log P(1|x) - log P(0|x), accumulated as a single sum of per-token
    differences so mirrored inputs cancel exactly."""
    size = model.vocabulary.size
    delta = float(model.log_prior[1] - model.log_prior[0])
    for i, v in x.items():
        if not 0 <= i < size:
            raise DimensionMismatch(f"feature index {i} outside vocabulary of {size}")
        delta += v * float(model.log_likelihood[1, i] - model.log_likelihood[0, i])
    return delta


def predict_nb(model: NaiveBayesModel, x: FeatureVector) -> Prediction:
    delta = _nb_log_odds(model, x)
    return Prediction(score=sigmoid(delta), label=1 if delta >= 0 else 0)


def train_svm(
    examples: Sequence[tuple[FeatureVector, int]],
    hyper: SvmHyper = SvmHyper(),
    *,
    vocabulary: Vocabulary,
    fingerprint: str = "",
    feature_kind: str = "bow",
) -> SvmModel:
    """Pegasos-style stochastic subgradient descent on the hinge loss.

    Labels are remapped to {-1,+1}; the learning rate at update t is
    1/(lam*t) and the weight vector is projected onto the 1/sqrt(lam) ball.
    Shuffling is seeded, so training is deterministic.
    """
    X, y01 = _assemble(examples, vocabulary.size)
    _check_two_classes(y01)
    y = 2.0 * y01 - 1.0
    n = X.shape[0]
    rng = np.random.default_rng(hyper.seed)
    w = np.zeros(vocabulary.size)
    b = 0.0
    radius = 1.0 / math.sqrt(hyper.lam)
    t = 0
    for _epoch in range(hyper.epochs):
        for idx in rng.permutation(n):
            t += 1
            eta = 1.0 / (hyper.lam * t)
            row = X.getrow(idx)
            margin = y[idx] * (row.dot(w)[0] + b)
            w *= 1.0 - eta * hyper.lam
            if margin < 1.0:
                w[row.indices] += eta * y[idx] * row.data
                b += eta * y[idx]
            norm = float(np.linalg.norm(w))
            if norm > radius:
                w *= radius / norm
    return SvmModel(
        weights=w,
        bias=b,
        vocabulary=vocabulary,
        pipeline_fingerprint=fingerprint,
        hyper=hyper,
        feature_kind=feature_kind,
    )


def decision_value(model: SvmModel, x: FeatureVector) -> float:
    z = model.bias
    size = model.vocabulary.size
    for i, v in x.items():
        if not 0 <= i < size:
            raise DimensionMismatch(f"feature index {i} outside vocabulary of {size}")
        z += model.weights[i] * v
    return z


def predict(model: Model, x: FeatureVector) -> Prediction:
    """Uniform decision rule: label 1 iff probability >= 0.5 (logistic,
    naive bayes) or margin >= 0 (svm); ties go to the stressed class."""
    if isinstance(model, LogisticModel):
        p = predict_proba(model, x)
        return Prediction(score=p, label=1 if p >= 0.5 else 0)
    if isinstance(model, NaiveBayesModel):
        return predict_nb(model, x)
    if isinstance(model, SvmModel):
        z = decision_value(model, x)
        return Prediction(score=z, label=1 if z >= 0.0 else 0)
    raise TypeError(f"unknown model type: {type(model)!r}")


def _vocab_to_json(vocab: Vocabulary) -> dict:
    return {
        "tokens": list(vocab.tokens),
        "df": list(vocab.doc_freq),
        "n_docs": vocab.n_docs,
    }


def _vocab_from_json(obj: dict) -> Vocabulary:
    return Vocabulary(
        tokens=tuple(obj["tokens"]),
        doc_freq=tuple(int(d) for d in obj["df"]),
        n_docs=int(obj["n_docs"]),
    )


def save_model(model: Model, path: str | Path) -> None:
    if isinstance(model, LogisticModel):
        hyper = {
            "learning_rate": model.hyper.learning_rate,
            "epochs": model.hyper.epochs,
            "l2": model.hyper.l2,
            "seed": model.hyper.seed,
            "effective_learning_rate": model.effective_learning_rate,
            "features": model.feature_kind,
        }
        params = {"bias": model.bias, "coef": model.coef.tolist()}
    elif isinstance(model, NaiveBayesModel):
        hyper = {"alpha": model.hyper.alpha, "features": model.feature_kind}
        params = {
            "log_prior": model.log_prior.tolist(),
            "log_likelihood": [row.tolist() for row in model.log_likelihood],
        }
    elif isinstance(model, SvmModel):
        hyper = {
            "lam": model.hyper.lam,
            "epochs": model.hyper.epochs,
            "seed": model.hyper.seed,
            "features": model.feature_kind,
        }
        params = {"weights": model.weights.tolist(), "bias": model.bias}
    else:
        raise TypeError(f"unknown model type: {type(model)!r}")
    document = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "hyperparameters": hyper,
        "pipeline_fingerprint": model.pipeline_fingerprint,
        "vocabulary": _vocab_to_json(model.vocabulary),
        "parameters": params,
    }
    Path(path).write_text(json.dumps(document), encoding="utf-8")


def load_model(path: str | Path) -> Model:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptFile(f"{path}: not a valid model file: {exc}") from None
    if not isinstance(document, dict) or "format_version" not in document:
        raise CorruptFile(f"{path}: not a model document")
    if document["format_version"] != MODEL_FORMAT_VERSION:
        raise VersionMismatch(
            f"{path}: format version {document['format_version']} "
            f"(this reader supports {MODEL_FORMAT_VERSION})"
        )
    try:
        kind = document["kind"]
        vocab = _vocab_from_json(document["vocabulary"])
        hyper = document["hyperparameters"]
        params = document["parameters"]
        fingerprint = document["pipeline_fingerprint"]
        feature_kind = hyper.get("features", "bow")
        if kind == "logistic":
            return LogisticModel(
                bias=float(params["bias"]),
                coef=np.asarray(params["coef"], dtype=float),
                vocabulary=vocab,
                pipeline_fingerprint=fingerprint,
                hyper=LogisticHyper(
                    learning_rate=hyper["learning_rate"],
                    epochs=hyper["epochs"],
                    l2=hyper["l2"],
                    seed=hyper["seed"],
                ),
                feature_kind=feature_kind,
                effective_learning_rate=hyper.get("effective_learning_rate"),
            )
        if kind == "naive_bayes":
            return NaiveBayesModel(
                log_prior=np.asarray(params["log_prior"], dtype=float),
                log_likelihood=np.asarray(params["log_likelihood"], dtype=float),
                vocabulary=vocab,
                pipeline_fingerprint=fingerprint,
                hyper=NaiveBayesHyper(alpha=hyper["alpha"]),
                feature_kind=feature_kind,
            )
        if kind == "svm":
            return SvmModel(
                weights=np.asarray(params["weights"], dtype=float),
                bias=float(params["bias"]),
                vocabulary=vocab,
                pipeline_fingerprint=fingerprint,
                hyper=SvmHyper(lam=hyper["lam"], epochs=hyper["epochs"], seed=hyper["seed"]),
                feature_kind=feature_kind,
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptFile(f"{path}: malformed model document: {exc}") from None
    raise CorruptFile(f"{path}: unknown classifier kind {kind!r}")
