"""Tiny differentiable text classifier used as the explanation target.

The classifier is deliberately small and fully transparent: token
embeddings are mean-pooled over positions, passed through one tanh hidden
layer, and projected to class probabilities with a softmax head. Every
parameter is a float64 numpy array, the forward pass is a pure function,
and the input gradient is computed analytically (reverse mode by hand),
which makes the model a convenient oracle target for attribution code.

Removing a word means replacing its embedding row with the PAD embedding;
a sentence with every position padded is the attribution baseline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, InputError, NumericError

PAD_TOKEN = "[pad]"

CHECKPOINT_FORMAT_VERSION = 1

# Architecture defaults for the bundled toy classifier.
DEFAULT_EMBED_DIM = 16
DEFAULT_HIDDEN_DIM = 16


@dataclass(frozen=True)
class Vocabulary:
    """Token-to-index map with a reserved PAD slot.

    Indices are dense 0..V-1 and the PAD index never collides with a word
    index.
    """

    token_to_index: dict[str, int]
    pad_index: int
    embed_dim: int

    def __post_init__(self) -> None:
        indices = sorted(self.token_to_index.values())
        if indices != list(range(len(indices))):
            raise InputError("vocabulary indices must be dense 0..V-1")
        if self.pad_index not in self.token_to_index.values():
            raise InputError("pad index missing from vocabulary")
        if self.embed_dim < 1:
            raise InputError("embedding dimension must be positive")

    @property
    def size(self) -> int:
        return len(self.token_to_index)

    def index_or_pad(self, token: str) -> int:
        """Look up a token, falling back to the PAD index when unknown."""
        return self.token_to_index.get(token, self.pad_index)

    @classmethod
    def build(cls, token_lists: Sequence[Sequence[str]], embed_dim: int) -> "Vocabulary":
        """Build a vocabulary from tokenized texts, PAD first at index 0.

        Word order is sorted, so the result does not depend on corpus order.
        """
        words = sorted({tok for toks in token_lists for tok in toks if tok != PAD_TOKEN})
        mapping = {PAD_TOKEN: 0}
        mapping.update({tok: i + 1 for i, tok in enumerate(words)})
        return cls(token_to_index=mapping, pad_index=0, embed_dim=embed_dim)


@dataclass(frozen=True)
class Instance:
    """One tokenized text ready for explanation.

    ``embeddings`` row i holds the word embedding of ``tokens[i]`` where
    ``pad_mask[i]`` is False and the PAD embedding where it is True.
    """

    tokens: tuple[int, ...]
    embeddings: np.ndarray
    label: int
    pad_mask: np.ndarray

    def __post_init__(self) -> None:
        if len(self.tokens) < 1:
            raise InputError("instance needs at least one token")
        if self.embeddings.shape[0] != len(self.tokens) or len(self.pad_mask) != len(self.tokens):
            raise InputError("instance shape mismatch between tokens, embeddings, and mask")

    def __len__(self) -> int:
        return len(self.tokens)


def embed(
    table: np.ndarray,
    pad_index: int,
    tokens: Sequence[int],
    pad_mask: Sequence[bool] | None = None,
) -> np.ndarray:
    """Row-wise embedding lookup that honors a pad mask.

    Masked positions receive the PAD embedding row regardless of the token
    stored there, so padding an already-padded position is a no-op.
    """
    idx = np.asarray(tokens, dtype=np.intp)
    if idx.size == 0:
        raise InputError("cannot embed an empty token sequence")
    if idx.min() < 0 or idx.max() >= table.shape[0]:
        raise InputError(
            f"token index out of range: got {int(idx.max())}, vocabulary size {table.shape[0]}"
        )
    rows = np.array(table[idx], dtype=np.float64, copy=True)
    if pad_mask is not None:
        mask = np.asarray(pad_mask, dtype=bool)
        if mask.shape[0] != idx.shape[0]:
            raise InputError("pad mask length must match token count")
        rows[mask] = table[pad_index]
    return rows


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


@dataclass
class Model:
    """Mean-pool -> affine -> tanh -> affine -> softmax classifier.

    Immutable after training by convention: `forward` and `input_gradient`
    are pure and safe to call concurrently.
    """

    vocab: Vocabulary
    embedding: np.ndarray  # (V, d)
    w1: np.ndarray  # (H, d)
    b1: np.ndarray  # (H,)
    w2: np.ndarray  # (C, H)
    b2: np.ndarray  # (C,)

    @property
    def num_classes(self) -> int:
        return self.w2.shape[0]

    @property
    def embed_dim(self) -> int:
        return self.embedding.shape[1]

    def baseline_embeddings(self, n: int) -> np.ndarray:
        """The all-PAD embedding matrix of n rows."""
        return np.tile(self.embedding[self.vocab.pad_index], (n, 1))

    def embed(self, tokens: Sequence[int], pad_mask: Sequence[bool] | None = None) -> np.ndarray:
        return embed(self.embedding, self.vocab.pad_index, tokens, pad_mask)

    def _check_input(self, embeddings: np.ndarray) -> np.ndarray:
        arr = np.asarray(embeddings, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != self.embed_dim:
            raise InputError(
                f"expected an (n, {self.embed_dim}) embedding matrix, got shape {arr.shape}"
            )
        if not np.isfinite(arr).all():
            raise NumericError("embedding matrix contains non-finite values")
        return arr

    def forward(self, embeddings: np.ndarray) -> np.ndarray:
        """Class probability vector for one embedded sentence."""
        arr = self._check_input(embeddings)
        pooled = arr.mean(axis=0)
        hidden = np.tanh(self.w1 @ pooled + self.b1)
        return _softmax(self.w2 @ hidden + self.b2)

    def input_gradient(self, embeddings: np.ndarray, target_class: int) -> np.ndarray:
        """Exact gradient of forward(...)[target_class] w.r.t. every input entry.

        Reverse-mode accumulation through the softmax head, both affine
        layers, and the mean pooling. Returns an (n, d) matrix.
        """
        arr = self._check_input(embeddings)
        if not 0 <= target_class < self.num_classes:
            raise InputError(f"class index {target_class} out of range [0, {self.num_classes})")
        n = arr.shape[0]
        pooled = arr.mean(axis=0)
        pre = self.w1 @ pooled + self.b1
        hidden = np.tanh(pre)
        probs = _softmax(self.w2 @ hidden + self.b2)
        # d p_c / d logits = p_c * (onehot(c) - p)
        grad_logits = -probs[target_class] * probs
        grad_logits[target_class] += probs[target_class]
        grad_hidden = self.w2.T @ grad_logits
        grad_pre = grad_hidden * (1.0 - hidden**2)
        grad_pooled = self.w1.T @ grad_pre
        return np.tile(grad_pooled / n, (n, 1))

    def predicted_class(self, embeddings: np.ndarray) -> int:
        """Argmax class of the forward pass; ties go to the lower index."""
        return int(np.argmax(self.forward(embeddings)))


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for the toy trainer.

    The seed fully determines parameter initialization and batch order.
    A zero learning rate is allowed and leaves the parameters at their
    initialization.
    """

    learning_rate: float = 0.5
    epochs: int = 80
    batch_size: int = 16
    seed: int = 42

    def __post_init__(self) -> None:
        if self.learning_rate < 0:
            raise ConfigError("learning_rate must be >= 0")
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")


def _init_model(vocab: Vocabulary, hidden_dim: int, num_classes: int, rng: np.random.Generator) -> Model:
    d = vocab.embed_dim
    return Model(
        vocab=vocab,
        embedding=rng.normal(scale=0.1, size=(vocab.size, d)),
        w1=rng.normal(scale=1.0 / np.sqrt(d), size=(hidden_dim, d)),
        b1=np.zeros(hidden_dim),
        w2=rng.normal(scale=1.0 / np.sqrt(hidden_dim), size=(num_classes, hidden_dim)),
        b2=np.zeros(num_classes),
    )


def train_toy(
    examples: Sequence[tuple[Sequence[str], int]],
    config: TrainConfig,
    embed_dim: int = DEFAULT_EMBED_DIM,
    hidden_dim: int = DEFAULT_HIDDEN_DIM,
) -> Model:
    """Train the toy classifier with minibatch SGD on cross-entropy.

    Deterministic under a fixed config seed: the same seed yields bitwise
    identical parameters. Raises InputError for an empty corpus or labels
    outside the inferred class range.
    """
    if not examples:
        raise InputError("training corpus is empty")
    labels = [label for _, label in examples]
    num_classes = max(labels) + 1
    if min(labels) < 0:
        raise InputError("labels must be non-negative class indices")
    if num_classes < 2:
        num_classes = 2

    vocab = Vocabulary.build([toks for toks, _ in examples], embed_dim)
    rng = np.random.default_rng(config.seed)
    model = _init_model(vocab, hidden_dim, num_classes, rng)

    # Pad every sequence to the longest one, as batched training would.
    # The PAD embedding then receives gradient from both classes equally
    # and converges to a neutral vector, which keeps the all-PAD baseline
    # close to an uninformative prediction.
    max_len = max(len(toks) for toks, _ in examples)
    token_ids = [
        np.asarray(
            [vocab.token_to_index[t] for t in toks] + [vocab.pad_index] * (max_len - len(toks)),
            dtype=np.intp,
        )
        for toks, _ in examples
    ]
    y = np.asarray(labels, dtype=np.intp)
    n_examples = len(examples)

    for _ in range(config.epochs):
        order = rng.permutation(n_examples)
        for start in range(0, n_examples, config.batch_size):
            batch = order[start : start + config.batch_size]
            grad_emb = np.zeros_like(model.embedding)
            grad_w1 = np.zeros_like(model.w1)
            grad_b1 = np.zeros_like(model.b1)
            grad_w2 = np.zeros_like(model.w2)
            grad_b2 = np.zeros_like(model.b2)
            for idx in batch:
                ids = token_ids[idx]
                rows = model.embedding[ids]
                pooled = rows.mean(axis=0)
                pre = model.w1 @ pooled + model.b1
                hidden = np.tanh(pre)
                probs = _softmax(model.w2 @ hidden + model.b2)
                # Cross-entropy gradient at the logits.
                delta = probs.copy()
                delta[y[idx]] -= 1.0
                grad_w2 += np.outer(delta, hidden)
                grad_b2 += delta
                grad_hidden = model.w2.T @ delta
                grad_pre = grad_hidden * (1.0 - hidden**2)
                grad_w1 += np.outer(grad_pre, pooled)
                grad_b1 += grad_pre
                grad_pooled = model.w1.T @ grad_pre
                np.add.at(grad_emb, ids, grad_pooled / len(ids))
            scale = config.learning_rate / len(batch)
            model.embedding -= scale * grad_emb
            model.w1 -= scale * grad_w1
            model.b1 -= scale * grad_b1
            model.w2 -= scale * grad_w2
            model.b2 -= scale * grad_b2
    return model


def training_accuracy(model: Model, examples: Sequence[tuple[Sequence[str], int]]) -> float:
    hits = 0
    for tokens, label in examples:
        ids = [model.vocab.index_or_pad(t) for t in tokens]
        if model.predicted_class(model.embed(ids)) == label:
            hits += 1
    return hits / len(examples)


def instance_from_words(
    model: Model, words: Sequence[str], label: int
) -> tuple[Instance, int]:
    """Build an Instance from raw words, mapping unknown words to PAD.

    Returns the instance plus the number of out-of-vocabulary words, which
    are treated as already-padded positions.
    """
    vocab = model.vocab
    ids = []
    mask = []
    oov = 0
    for word in words:
        idx = vocab.index_or_pad(word)
        unknown = word not in vocab.token_to_index
        oov += int(unknown)
        ids.append(idx)
        mask.append(unknown or idx == vocab.pad_index)
    mask_arr = np.asarray(mask, dtype=bool)
    inst = Instance(
        tokens=tuple(ids),
        embeddings=model.embed(ids, mask_arr),
        label=label,
        pad_mask=mask_arr,
    )
    return inst, oov


def pad_positions(model: Model, instance: Instance, positions: Sequence[int]) -> Instance:
    """Return a copy of the instance with the given positions padded.

    Idempotent: padding an already-padded position changes nothing.
    """
    n = len(instance)
    for pos in positions:
        if not 0 <= pos < n:
            raise InputError(f"pad position {pos} out of range for length {n}")
    mask = np.array(instance.pad_mask, copy=True)
    mask[list(positions)] = True
    return Instance(
        tokens=instance.tokens,
        embeddings=model.embed(instance.tokens, mask),
        label=instance.label,
        pad_mask=mask,
    )


def save_model(model: Model, path: str) -> None:
    """Write a self-describing JSON checkpoint (version field mandatory)."""
    payload = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "pad_token": PAD_TOKEN,
        "embed_dim": model.embed_dim,
        "hidden_dim": model.w1.shape[0],
        "num_classes": model.num_classes,
        "pad_index": model.vocab.pad_index,
        "vocab": model.vocab.token_to_index,
        "embedding": model.embedding.tolist(),
        "w1": model.w1.tolist(),
        "b1": model.b1.tolist(),
        "w2": model.w2.tolist(),
        "b2": model.b2.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_model(path: str) -> Model:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read model checkpoint: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"model checkpoint is not valid JSON: {exc}") from exc
    if not isinstance(payload, Mapping) or "format_version" not in payload:
        raise InputError("model checkpoint missing mandatory format_version field")
    if payload["format_version"] != CHECKPOINT_FORMAT_VERSION:
        raise InputError(
            f"unsupported checkpoint version {payload['format_version']}, "
            f"expected {CHECKPOINT_FORMAT_VERSION}"
        )
    vocab = Vocabulary(
        token_to_index={str(k): int(v) for k, v in payload["vocab"].items()},
        pad_index=int(payload["pad_index"]),
        embed_dim=int(payload["embed_dim"]),
    )
    return Model(
        vocab=vocab,
        embedding=np.asarray(payload["embedding"], dtype=np.float64),
        w1=np.asarray(payload["w1"], dtype=np.float64),
        b1=np.asarray(payload["b1"], dtype=np.float64),
        w2=np.asarray(payload["w2"], dtype=np.float64),
        b2=np.asarray(payload["b2"], dtype=np.float64),
    )
