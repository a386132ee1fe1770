"""Streaming, mergeable estimation of centered moments up to order four.

The accumulator is generic over a schema: a list of complex channels (each
with a provisional center and a flag saying whether it may be re-centered on
the empirical mean) and a list of named targets (linear combinations of
moment multisets).  Raw power sums of channel products are accumulated per
batch; centering is applied at finalize time by inclusion-exclusion, which
avoids a second pass while still centering on empirical means where wanted.

Batches are the unit of error estimation: one batch per trajectory in
ensemble runs.  Standard errors come from leave-one-out jackknife over
batches, which for plain moments reduces to batch means and extends cleanly
to nonlinear composites (criteria ratios and margins).

Centering modes at finalize time:
  reference  shift only channels flagged shiftable to their empirical means;
             non-shiftable channels (the pump) stay at their provisional
             reference centers (default, matches the analytic module)
  sample     shift every channel to its empirical mean
  none       no shifts; moments taken about the provisional centers
  raw        undo the provisional centers; plain uncentered moments
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .model import ModelParams, QuadratureSample, quadratures_to_alpha

CENTERINGS = ("reference", "sample", "none", "raw")

LOW_CONFIDENCE_BATCHES = 30


class SchemaError(ValueError):
    """Raised on schema mismatches or unknown channels/targets."""


class NoSamplesError(ValueError):
    """Raised when finalizing without enough data."""


@dataclass(frozen=True)
class ChannelSpec:
    name: str
    center: complex = 0.0
    shiftable: bool = True


@dataclass(frozen=True)
class TargetSpec:
    """A named moment: offset + sum of coef * <product over a multiset>.

    terms holds (coef, multiset) pairs where each multiset is a tuple of
    channel names (repeats allowed).  With apply_shift the multiset factors
    are centered per the finalize mode; without it the raw (provisionally
    centered) moment is reported, which is how plain means are exposed.
    """

    name: str
    terms: tuple
    apply_shift: bool = True
    offset: complex = 0.0


@dataclass(frozen=True)
class MomentSchema:
    channels: tuple
    targets: tuple
    params: ModelParams | None = None

    def __post_init__(self):
        names = [c.name for c in self.channels]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate channel names")
        index = {n: i for i, n in enumerate(names)}
        target_terms = {}
        keys = set()
        for tgt in self.targets:
            terms_idx = []
            for coef, mult in tgt.terms:
                try:
                    idx = tuple(sorted(index[ch] for ch in mult))
                except KeyError as exc:
                    raise SchemaError(f"unknown channel in target {tgt.name}: {exc}")
                if not 1 <= len(idx) <= 4:
                    raise SchemaError(f"target {tgt.name}: order must be 1..4")
                terms_idx.append((complex(coef), idx))
                keys.update(_submultisets(idx))
            if tgt.name in target_terms:
                raise SchemaError(f"duplicate target name {tgt.name}")
            target_terms[tgt.name] = tuple(terms_idx)
        # singletons always present so empirical shifts are computable
        keys.update((i,) for i in range(len(names)))
        keys.discard(())
        key_order = tuple(sorted(keys, key=lambda k: (len(k), k)))
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_target_terms", target_terms)
        object.__setattr__(self, "key_order", key_order)
        object.__setattr__(self, "_key_index", {k: i for i, k in enumerate(key_order)})

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    @property
    def n_keys(self) -> int:
        return len(self.key_order)

    def channel_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SchemaError(f"unknown channel {name!r}")

    def target_names(self):
        return [t.name for t in self.targets]

    def compatible(self, other: "MomentSchema") -> bool:
        return (
            self.channels == other.channels
            and self.targets == other.targets
            and self.params == other.params
        )


def _submultisets(idx: tuple) -> list:
    """All nonempty sub-multisets of a sorted index tuple, sorted tuples."""
    uniq = sorted(set(idx))
    mults = [idx.count(u) for u in uniq]
    out = []
    for kvec in itertools.product(*(range(m + 1) for m in mults)):
        sub = tuple(u for u, k in zip(uniq, kvec) for _ in range(k))
        if sub:
            out.append(sub)
    return out


@dataclass(frozen=True)
class MomentEstimate:
    """One moment: complex point estimate with componentwise jackknife errors."""

    value: complex
    std_error: float
    std_error_imag: float
    n_batches: int
    low_confidence: bool

    @property
    def real(self) -> float:
        return self.value.real

    @classmethod
    def from_values(cls, value, std_error=0.0, std_error_imag=0.0,
                    n_batches=0, low_confidence=False) -> "MomentEstimate":
        return cls(complex(value), float(std_error), float(std_error_imag),
                   int(n_batches), bool(low_confidence))

    def to_dict(self) -> dict:
        return {
            "value": [self.value.real, self.value.imag],
            "std_error": self.std_error,
            "std_error_imag": self.std_error_imag,
            "n_batches": self.n_batches,
            "low_confidence": self.low_confidence,
        }


@dataclass
class MomentReport:
    entries: dict
    n_samples: int
    n_batches: int
    centering: str
    source: "MomentAccumulator | None" = None
    label: str = "monte-carlo"
    params: ModelParams | None = None

    def __getitem__(self, name: str) -> MomentEstimate:
        try:
            return self.entries[name]
        except KeyError:
            raise SchemaError(f"moment {name!r} missing from report")

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "n_samples": self.n_samples,
            "n_batches": self.n_batches,
            "centering": self.centering,
            "moments": {k: v.to_dict() for k, v in self.entries.items()},
        }


class _Stats:
    """Evaluation context over raw moments; scalar or replicate-vector shaped.

    raw sums have shape (K,) for the full dataset or (B, K) for the
    leave-one-out replicates; every derived quantity broadcasts accordingly.
    """

    def __init__(self, schema: MomentSchema, sums, n, centering: str):
        self.schema = schema
        self._sums = sums          # (K,) or (B, K) or (K, M) handled via axis
        self._n = n                # scalar or (B,)
        self.centering = centering
        self._cache = {}
        self._shift_cache = {}

    def raw(self, key: tuple):
        if key == ():
            return 1.0 if np.isscalar(self._n) else np.ones_like(self._n, dtype=np.complex128)
        idx = self.schema._key_index[key]
        if np.isscalar(self._n):
            return self._sums[idx] / self._n
        return self._sums[..., idx] / self._n

    def shift(self, ch: int):
        if ch in self._shift_cache:
            return self._shift_cache[ch]
        spec = self.schema.channels[ch]
        if self.centering == "sample" or (self.centering == "reference" and spec.shiftable):
            val = self.raw((ch,))
        elif self.centering == "raw":
            val = -complex(spec.center)
            if not np.isscalar(self._n):
                val = np.full_like(self._n, val, dtype=np.complex128)
        else:
            val = 0.0
        self._shift_cache[ch] = val
        return val

    def centered(self, key: tuple):
        """Inclusion-exclusion: E[prod (v_c - shift_c)] from raw moments."""
        uniq = sorted(set(key))
        mults = [key.count(u) for u in uniq]
        shifts = [self.shift(u) for u in uniq]
        if all(np.all(s == 0.0) if not np.isscalar(s) else s == 0.0 for s in shifts):
            return self.raw(key)
        total = 0.0
        for kvec in itertools.product(*(range(m + 1) for m in mults)):
            sub = tuple(u for u, k in zip(uniq, kvec) for _ in range(k))
            coef = 1.0
            for u, m, k, s in zip(uniq, mults, kvec, shifts):
                coef = coef * math.comb(m, k) * (-s) ** (m - k)
            total = total + coef * self.raw(sub)
        return total

    def target(self, name: str):
        if name in self._cache:
            return self._cache[name]
        terms = self.schema._target_terms.get(name)
        if terms is None:
            raise SchemaError(f"unknown target {name!r}")
        spec = next(t for t in self.schema.targets if t.name == name)
        total = complex(spec.offset)
        for coef, key in terms:
            part = self.centered(key) if spec.apply_shift else self.raw(key)
            total = total + coef * part
        self._cache[name] = total
        return total

    @property
    def n(self):
        return self._n


def _jack_se(full, loo, axis=-1):
    """Componentwise jackknife SE of `full` from leave-one-out replicates."""
    b = loo.shape[axis]
    fac = (b - 1) / b
    def one(part):
        m = part.mean(axis=axis, keepdims=True)
        return np.sqrt(fac * ((part - m) ** 2).sum(axis=axis))
    return one(loo.real), one(loo.imag)


@dataclass(frozen=True)
class JackknifeResult:
    value: np.ndarray
    std_error: np.ndarray
    std_error_imag: np.ndarray
    n_batches: int


class MomentAccumulator:
    """Mergeable raw-moment sums with per-batch bookkeeping.

    Samples arrive as channel vectors (values in schema channel order).
    One batch per add_batch call; add_sample buffers rows and flushes a
    batch every `batch_size` samples.  Per-key sums use pairwise summation
    within a batch and compensated (Kahan) summation across batches.
    """

    def __init__(self, schema: MomentSchema, batch_size: int = 256,
                 collect_per_sample: bool = False):
        self.schema = schema
        self.batch_size = int(batch_size)
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        self._batch_sums = []     # list of (K,) complex arrays
        self._batch_ns = []       # list of ints
        self._buffer = []
        self.collect_per_sample = bool(collect_per_sample)
        self.per_sample_sums = None    # (K, n_samples) complex when collected
        self.per_sample_rows = 0       # number of trajectories folded in

    # -- feeding ---------------------------------------------------------

    def _center_values(self, values: np.ndarray) -> np.ndarray:
        centers = np.array([c.center for c in self.schema.channels],
                           dtype=np.complex128)
        return values - centers.reshape((-1,) + (1,) * (values.ndim - 1))

    def _key_products(self, centered: np.ndarray) -> list:
        out = []
        for key in self.schema.key_order:
            prod = centered[key[0]]
            for idx in key[1:]:
                prod = prod * centered[idx]
            out.append(prod)
        return out

    def add_batch(self, values) -> "MomentAccumulator":
        """One batch of samples: values shaped (n_channels, n)."""
        values = np.asarray(values, dtype=np.complex128)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape[0] != self.schema.n_channels:
            raise SchemaError(
                f"expected {self.schema.n_channels} channels, got {values.shape[0]}"
            )
        if not (np.all(np.isfinite(values.real)) and np.all(np.isfinite(values.imag))):
            raise ValueError("non-finite sample values")
        centered = self._center_values(values)
        sums = np.array([p.sum() for p in self._key_products(centered)],
                        dtype=np.complex128)
        self._batch_sums.append(sums)
        self._batch_ns.append(values.shape[1])
        return self

    def add_batches(self, values) -> "MomentAccumulator":
        """Many per-trajectory batches at once: values shaped (n_channels, B, n).

        Equivalent to B add_batch calls; vectorized across trajectories.
        When collect_per_sample is set, also folds per-sample-index sums
        (over trajectories) for running-average curves.
        """
        values = np.asarray(values, dtype=np.complex128)
        if values.ndim != 3 or values.shape[0] != self.schema.n_channels:
            raise SchemaError("expected values shaped (n_channels, B, n)")
        nb, n = values.shape[1], values.shape[2]
        if nb == 0:
            return self
        if not (np.all(np.isfinite(values.real)) and np.all(np.isfinite(values.imag))):
            raise ValueError("non-finite sample values")
        centered = self._center_values(values)
        prods = self._key_products(centered)        # each (B, n)
        per_batch = np.empty((nb, self.schema.n_keys), dtype=np.complex128)
        for k, prod in enumerate(prods):
            per_batch[:, k] = prod.sum(axis=1)
        self._batch_sums.extend(per_batch)
        self._batch_ns.extend([n] * nb)
        if self.collect_per_sample:
            if self.per_sample_sums is None:
                self.per_sample_sums = np.zeros((self.schema.n_keys, n),
                                                dtype=np.complex128)
            elif self.per_sample_sums.shape[1] != n:
                raise SchemaError("per-sample collection needs a fixed sample count")
            for k, prod in enumerate(prods):
                self.per_sample_sums[k] += prod.sum(axis=0)
            self.per_sample_rows += nb
        return self

    def add_sample(self, values) -> "MomentAccumulator":
        """Buffer one sample vector; flushes a batch every batch_size samples."""
        row = np.asarray(values, dtype=np.complex128).reshape(-1)
        if row.shape[0] != self.schema.n_channels:
            raise SchemaError(
                f"expected {self.schema.n_channels} channel values, got {row.shape[0]}"
            )
        self._buffer.append(row)
        if len(self._buffer) >= self.batch_size:
            self.flush()
        return self

    def flush(self) -> "MomentAccumulator":
        if self._buffer:
            block = np.stack(self._buffer, axis=1)
            self._buffer = []
            self.add_batch(block)
        return self

    # -- bookkeeping -----------------------------------------------------

    @property
    def n_samples(self) -> int:
        return int(sum(self._batch_ns)) + len(self._buffer)

    @property
    def n_batches(self) -> int:
        return len(self._batch_sums) + (1 if self._buffer else 0)

    def copy(self) -> "MomentAccumulator":
        out = MomentAccumulator(self.schema, batch_size=self.batch_size,
                                collect_per_sample=self.collect_per_sample)
        out._batch_sums = list(self._batch_sums)
        out._batch_ns = list(self._batch_ns)
        out._buffer = [r.copy() for r in self._buffer]
        if self.per_sample_sums is not None:
            out.per_sample_sums = self.per_sample_sums.copy()
        out.per_sample_rows = self.per_sample_rows
        return out

    def merge_in_place(self, other: "MomentAccumulator") -> "MomentAccumulator":
        if not self.schema.compatible(other.schema):
            raise SchemaError("cannot merge accumulators with different schemas")
        self.flush()
        other = other.copy()
        other.flush()
        self._batch_sums.extend(other._batch_sums)
        self._batch_ns.extend(other._batch_ns)
        if other.per_sample_sums is not None:
            if self.per_sample_sums is None:
                self.collect_per_sample = True
                self.per_sample_sums = other.per_sample_sums.copy()
                self.per_sample_rows = other.per_sample_rows
            else:
                if self.per_sample_sums.shape != other.per_sample_sums.shape:
                    raise SchemaError("per-sample shapes differ; cannot merge")
                self.per_sample_sums += other.per_sample_sums
                self.per_sample_rows += other.per_sample_rows
        return self

    # -- evaluation ------------------------------------------------------

    def _stacked(self):
        self.flush()
        b = len(self._batch_sums)
        if b == 0:
            raise NoSamplesError("no samples")
        if b < 2:
            raise NoSamplesError(
                f"need at least 2 batches for standard errors, have {b}"
            )
        stacked = np.stack(self._batch_sums, axis=0)      # (B, K)
        ns = np.asarray(self._batch_ns, dtype=np.float64)  # (B,)
        totals = _kahan_colsum(stacked)                    # (K,)
        return stacked, ns, totals

    def _contexts(self, centering: str):
        if centering not in CENTERINGS:
            raise ValueError(f"centering must be one of {CENTERINGS}")
        stacked, ns, totals = self._stacked()
        n_total = ns.sum()
        full = _Stats(self.schema, totals, float(n_total), centering)
        loo = _Stats(self.schema, totals[None, :] - stacked, n_total - ns, centering)
        return full, loo, len(ns), float(n_total)

    def jackknife(self, fn, centering: str = "reference") -> JackknifeResult:
        """Leave-one-batch-out errors for an arbitrary composite statistic.

        fn maps a stats context to a scalar or 1-d array of values and must
        be written with numpy-broadcastable operations: it is evaluated once
        on scalars (full dataset) and once on (B,)-shaped replicate arrays.
        """
        full, loo, b, _ = self._contexts(centering)
        value = np.atleast_1d(np.asarray(fn(full), dtype=np.complex128))
        reps = np.asarray(fn(loo), dtype=np.complex128)
        reps = reps.reshape(value.shape + (b,)) if reps.ndim == value.ndim else reps
        se_re, se_im = _jack_se(value, reps, axis=-1)
        return JackknifeResult(value=value, std_error=se_re,
                               std_error_imag=se_im, n_batches=b)

    def finalize(self, centering: str = "reference",
                 label: str = "monte-carlo") -> MomentReport:
        full, loo, b, n_total = self._contexts(centering)
        low_conf = b < LOW_CONFIDENCE_BATCHES
        entries = {}
        for tgt in self.schema.targets:
            val = complex(np.asarray(full.target(tgt.name)).item())
            reps = np.asarray(loo.target(tgt.name), dtype=np.complex128)
            se_re, se_im = _jack_se(val, reps[None, :], axis=-1)
            entries[tgt.name] = MomentEstimate(
                value=val,
                std_error=float(se_re[0]),
                std_error_imag=float(se_im[0]),
                n_batches=b,
                low_confidence=low_conf,
            )
        return MomentReport(entries=entries, n_samples=int(n_total),
                            n_batches=b, centering=centering,
                            source=self, label=label,
                            params=self.schema.params)


def _kahan_colsum(arr: np.ndarray) -> np.ndarray:
    """Compensated column sums of a (B, K) complex array."""
    s = np.zeros(arr.shape[1], dtype=np.complex128)
    c = np.zeros(arr.shape[1], dtype=np.complex128)
    for row in arr:
        y = row - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


# -- spec-level free functions ------------------------------------------


def accumulate(acc: MomentAccumulator, sample) -> MomentAccumulator:
    """Feed one sample (QuadratureSample or channel vector) into acc."""
    if isinstance(sample, QuadratureSample):
        acc.add_sample(sample_to_channels(sample, acc.schema))
    else:
        acc.add_sample(sample)
    return acc


def merge(a: MomentAccumulator, b: MomentAccumulator) -> MomentAccumulator:
    """Combined accumulator equal to accumulation over both streams.

    Buffered partial batches are flushed first, so batch boundaries (and
    hence standard errors, not point estimates) can differ from a single
    concatenated stream.
    """
    return a.copy().merge_in_place(b)


def finalize(acc: MomentAccumulator, centering: str = "reference") -> MomentReport:
    return acc.finalize(centering=centering)


# -- the OPO schema ----------------------------------------------------


OPO_CHANNELS = ("x0", "y0", "x", "y", "xp", "yp",
                "a0", "a0p", "a1", "a1p", "a2", "a2p")


def opo_schema(params: ModelParams) -> MomentSchema:
    """Channels and targets for the three-mode OPO.

    Pump channels are provisionally centered on the zeroth-order steady
    state (x0 on 2*mu, amplitudes on mu/eps) and are not shiftable: under
    the default "reference" centering their fluctuations stay referenced to
    the zeroth-order values, matching the analytic module.  Down-converted
    channels are centered on 0 and shiftable (their means vanish by the
    sign-flip symmetry of the equations, so this is a no-op on average).
    """
    mu_eps = params.mu / params.eps
    channels = (
        ChannelSpec("x0", 2.0 * params.mu, shiftable=False),
        ChannelSpec("y0", 0.0, shiftable=False),
        ChannelSpec("x", 0.0),
        ChannelSpec("y", 0.0),
        ChannelSpec("xp", 0.0),
        ChannelSpec("yp", 0.0),
        ChannelSpec("a0", mu_eps, shiftable=False),
        ChannelSpec("a0p", mu_eps, shiftable=False),
        ChannelSpec("a1", 0.0),
        ChannelSpec("a1p", 0.0),
        ChannelSpec("a2", 0.0),
        ChannelSpec("a2p", 0.0),
    )
    t = TargetSpec
    targets = (
        t("t1", (((1, ("x", "xp", "x0"))),)),
        t("t2", (((1, ("y", "yp", "x0"))),)),
        t("t3", (((1, ("y", "xp", "y0"))),)),
        t("t4", (((1, ("x", "yp", "y0"))),)),
        t("s", ((-1, ("x", "xp", "x0")), (1, ("y", "yp", "x0")),
                (1, ("y", "xp", "y0")), (1, ("x", "yp", "y0")))),
        t("var_x0", ((1, ("x0", "x0")),)),
        t("var_y0", ((1, ("y0", "y0")),)),
        t("skew_x0", ((1, ("x0", "x0", "x0")),)),
        t("cov_x_xp", ((1, ("x", "xp")),)),
        t("cov_y_yp", ((1, ("y", "yp")),)),
        t("cov_x0_x", ((1, ("x0", "x")),)),
        t("cov_x0_y", ((1, ("x0", "y")),)),
        t("cov_y0_x", ((1, ("y0", "x")),)),
        t("cov_y0_y", ((1, ("y0", "y")),)),
        t("q4", ((1, ("x", "x", "xp", "xp")), (1, ("x", "x", "yp", "yp")),
                 (1, ("y", "y", "xp", "xp")), (1, ("y", "y", "yp", "yp")))),
        t("amp_n1n2", ((1, ("a1", "a1p", "a2", "a2p")),)),
        t("amp_n2n0", ((1, ("a2", "a2p", "a0", "a0p")),)),
        t("amp_n0n1", ((1, ("a0", "a0p", "a1", "a1p")),)),
        t("amp_n0", ((1, ("a0", "a0p")),)),
        t("amp_n1", ((1, ("a1", "a1p")),)),
        t("amp_n2", ((1, ("a2", "a2p")),)),
        t("amp_triple", ((1, ("a0", "a1", "a2")),)),
        t("amp_triple_conj", ((1, ("a0p", "a1p", "a2p")),)),
        t("mean_x0", ((1, ("x0",)),), apply_shift=False, offset=2.0 * params.mu),
        t("mean_y0", ((1, ("y0",)),), apply_shift=False),
        t("mean_x", ((1, ("x",)),), apply_shift=False),
        t("mean_y", ((1, ("y",)),), apply_shift=False),
        t("mean_xp", ((1, ("xp",)),), apply_shift=False),
        t("mean_yp", ((1, ("yp",)),), apply_shift=False),
    )
    return MomentSchema(channels=channels, targets=targets, params=params)


def amplitude_schema(centers=(0.0,) * 6) -> MomentSchema:
    """Six bare amplitude channels; used for synthetic classical ensembles."""
    names = ("a0", "a0p", "a1", "a1p", "a2", "a2p")
    if len(centers) != 6:
        raise SchemaError("need 6 centers")
    channels = tuple(ChannelSpec(n, c) for n, c in zip(names, centers))
    t = TargetSpec
    targets = (
        t("amp_n1n2", ((1, ("a1", "a1p", "a2", "a2p")),)),
        t("amp_n2n0", ((1, ("a2", "a2p", "a0", "a0p")),)),
        t("amp_n0n1", ((1, ("a0", "a0p", "a1", "a1p")),)),
        t("amp_n0", ((1, ("a0", "a0p")),)),
        t("amp_n1", ((1, ("a1", "a1p")),)),
        t("amp_n2", ((1, ("a2", "a2p")),)),
        t("amp_triple", ((1, ("a0", "a1", "a2")),)),
        t("amp_triple_conj", ((1, ("a0p", "a1p", "a2p")),)),
        t("mean_a0", ((1, ("a0",)),), apply_shift=False),
    )
    return MomentSchema(channels=channels, targets=targets)


def sample_to_channels(sample: QuadratureSample, schema: MomentSchema) -> np.ndarray:
    """Channel vector for one QuadratureSample under the OPO schema.

    Amplitudes are reconstructed through the exact inverse transform, so a
    stream of samples carries the full channel set.
    """
    if schema.params is None:
        raise SchemaError("schema has no model params; cannot map samples")
    state = quadratures_to_alpha(sample, schema.params)
    return np.array(
        [sample.x0, sample.y0, sample.x, sample.y, sample.xp, sample.yp,
         state.a0, state.a0p, state.a1, state.a1p, state.a2, state.a2p],
        dtype=np.complex128,
    )


def state_channels(states: np.ndarray, params: ModelParams) -> np.ndarray:
    """Channel values from raw phase-space states.

    states has shape (6, ...) ordered (a0, a1, a2, a0p, a1p, a2p); returns
    (12, ...) in OPO_CHANNELS order.
    """
    g, eps = params.g, params.eps
    a0, a1, a2, a0p, a1p, a2p = states
    return np.stack([
        eps * (a0 + a0p),
        -1j * eps * (a0 - a0p),
        g * (a1 + a2p),
        -1j * g * (a1 - a2p),
        g * (a2 + a1p),
        -1j * g * (a2 - a1p),
        a0, a0p, a1, a1p, a2, a2p,
    ])
