"""Streaming moment accumulation: exact small-stream values, merge laws,
batch-means errors, centering algebra, and the quadrature/amplitude
mapping identities."""

import math

import numpy as np
import pytest

from opo3 import (
    ChannelSpec,
    ModelParams,
    MomentAccumulator,
    MomentSchema,
    NoSamplesError,
    SchemaError,
    TargetSpec,
    accumulate,
    alpha_to_quadratures,
    amplitude_schema,
    finalize,
    merge,
    opo_schema,
    ou_covariances,
    state_channels,
)
from opo3.model import PhaseSpaceState


def scalar_schema(center=0.0):
    t = TargetSpec
    return MomentSchema(
        channels=(ChannelSpec("u", center),),
        targets=(
            t("mean_u", ((1, ("u",)),), apply_shift=False, offset=center),
            t("m2", ((1, ("u", "u")),)),
            t("m3", ((1, ("u", "u", "u")),)),
            t("m4", ((1, ("u", "u", "u", "u")),)),
        ),
    )


def feed_scalars(acc, values):
    for v in values:
        accumulate(acc, [v])
    return acc


class TestSmallStreams:
    def test_mean_of_1_2_3(self):
        acc = MomentAccumulator(scalar_schema(), batch_size=1)
        feed_scalars(acc, [1.0, 2.0, 3.0])
        rep = finalize(acc, centering="sample")
        assert rep["mean_u"].value == pytest.approx(2.0, abs=1e-15)
        assert rep.n_samples == 3 and rep.n_batches == 3

    def test_third_central_moment_of_0_0_3(self):
        acc = MomentAccumulator(scalar_schema(), batch_size=1)
        feed_scalars(acc, [0.0, 0.0, 3.0])
        rep = finalize(acc, centering="sample")
        # mean 1; ((-1)^3 + (-1)^3 + 2^3)/3 = 2
        assert rep["m3"].value == pytest.approx(2.0, abs=1e-12)

    def test_empty_stream_errors(self):
        acc = MomentAccumulator(scalar_schema())
        with pytest.raises(NoSamplesError, match="no samples"):
            finalize(acc)
        assert isinstance(NoSamplesError("x"), ValueError)

    def test_single_batch_cannot_give_errors(self):
        acc = MomentAccumulator(scalar_schema(), batch_size=256)
        feed_scalars(acc, [1.0, 2.0, 3.0])  # stays in one buffered batch
        with pytest.raises(NoSamplesError, match="at least 2 batches"):
            finalize(acc)

    def test_non_finite_rejected(self):
        acc = MomentAccumulator(scalar_schema())
        with pytest.raises(ValueError, match="non-finite"):
            acc.add_batch(np.array([[1.0, float("nan")]]))
        with pytest.raises(ValueError, match="non-finite"):
            acc.add_batch(np.array([[1.0, complex(0, float("inf"))]]))


def two_channel_schema():
    t = TargetSpec
    return MomentSchema(
        channels=(ChannelSpec("u"), ChannelSpec("v")),
        targets=(
            t("mu_u", ((1, ("u",)),), apply_shift=False),
            t("var_u", ((1, ("u", "u")),)),
            t("cov_uv", ((1, ("u", "v")),)),
            t("m3_uuv", ((1, ("u", "u", "v")),)),
            t("m4", ((1, ("u", "u", "v", "v")),)),
        ),
    )


def random_stream(rng, n):
    return rng.standard_normal((2, n)) + 1j * rng.standard_normal((2, n))


class TestMergeLaws:
    def test_merge_equals_concatenation(self):
        rng = np.random.default_rng(211)
        schema = two_channel_schema()
        for _ in range(10):
            n = int(rng.integers(40, 300))
            data = random_stream(rng, n)
            cut = int(rng.integers(1, n))
            bs = int(rng.integers(3, 40))
            whole = MomentAccumulator(schema, batch_size=bs)
            left = MomentAccumulator(schema, batch_size=bs)
            right = MomentAccumulator(schema, batch_size=bs)
            for k in range(n):
                whole.add_sample(data[:, k])
                (left if k < cut else right).add_sample(data[:, k])
            m = merge(left, right)
            assert m.n_samples == whole.n_samples == n
            rep_m = finalize(m, centering="sample")
            rep_w = finalize(whole, centering="sample")
            for name in schema.target_names():
                assert rep_m[name].value == pytest.approx(
                    rep_w[name].value, rel=1e-12, abs=1e-12)

    def test_merge_with_empty_is_identity(self):
        rng = np.random.default_rng(223)
        schema = two_channel_schema()
        a = MomentAccumulator(schema, batch_size=16)
        for k in range(100):
            a.add_sample(random_stream(rng, 1)[:, 0])
        empty = MomentAccumulator(schema, batch_size=16)
        m = merge(a, empty)
        rep_a = finalize(a.copy())
        rep_m = finalize(m)
        assert rep_m.n_samples == rep_a.n_samples
        assert rep_m.n_batches == rep_a.n_batches
        for name in schema.target_names():
            assert rep_m[name].value == rep_a[name].value
            assert rep_m[name].std_error == rep_a[name].std_error

    def test_merge_commutes(self):
        rng = np.random.default_rng(227)
        schema = two_channel_schema()
        a = MomentAccumulator(schema, batch_size=8)
        b = MomentAccumulator(schema, batch_size=8)
        for _ in range(7):
            a.add_batch(random_stream(rng, 20))
        for _ in range(5):
            b.add_batch(random_stream(rng, 13))
        ab = finalize(merge(a, b))
        ba = finalize(merge(b, a))
        for name in schema.target_names():
            assert ab[name].value == pytest.approx(ba[name].value,
                                                   rel=1e-12, abs=1e-14)
            assert ab[name].std_error == pytest.approx(ba[name].std_error,
                                                       rel=1e-10, abs=1e-14)

    def test_merge_schema_mismatch(self):
        a = MomentAccumulator(two_channel_schema())
        b = MomentAccumulator(scalar_schema())
        with pytest.raises(SchemaError):
            merge(a, b)


class TestErrorBars:
    def test_se_shrinks_as_sqrt_n(self):
        rng = np.random.default_rng(229)
        schema = scalar_schema()
        ses = []
        for n in (2000, 8000):
            acc = MomentAccumulator(schema, batch_size=50)
            acc.add_batches(rng.standard_normal((1, n // 50, 50)).astype(complex))
            ses.append(finalize(acc, centering="sample")["m2"].std_error)
        ratio = ses[0] / ses[1]
        assert 1.6 <= ratio <= 2.4

    def test_gaussian_third_moments_unbiased(self):
        rng = np.random.default_rng(233)
        acc = MomentAccumulator(two_channel_schema(), batch_size=100)
        data = rng.standard_normal((2, 200, 100))  # real Gaussian, mean 0
        acc.add_batches(data.astype(complex))
        rep = finalize(acc, centering="sample")
        m3 = rep["m3_uuv"]
        assert abs(m3.value.real) <= 4.0 * m3.std_error
        assert m3.low_confidence is False

    def test_low_confidence_flag(self):
        rng = np.random.default_rng(239)
        schema = scalar_schema()
        for b, expect in ((29, True), (30, False)):
            acc = MomentAccumulator(schema)
            acc.add_batches(rng.standard_normal((1, b, 10)).astype(complex))
            rep = finalize(acc)
            assert rep["m2"].low_confidence is expect
            assert rep.n_batches == b

    def test_add_batches_matches_sequential_add_batch(self):
        rng = np.random.default_rng(241)
        data = (rng.standard_normal((6, 7, 40))
                + 1j * rng.standard_normal((6, 7, 40)))
        schema = amplitude_schema()
        a = MomentAccumulator(schema).add_batches(data)
        b = MomentAccumulator(schema)
        for j in range(7):
            b.add_batch(data[:, j, :])
        ra, rb = finalize(a, "sample"), finalize(b, "sample")
        for name in schema.target_names():
            assert ra[name].value == pytest.approx(rb[name].value, rel=1e-13)
            assert ra[name].std_error == pytest.approx(rb[name].std_error,
                                                       rel=1e-10, abs=1e-16)


class TestCentering:
    def test_modes_against_direct_evaluation(self):
        rng = np.random.default_rng(251)
        c = 1.7
        u = rng.standard_normal(400) + 3.0
        acc = MomentAccumulator(scalar_schema(center=c), batch_size=40)
        acc.add_batch(u[None, :200].astype(complex))
        acc.add_batch(u[None, 200:].astype(complex))
        expect = {
            "none": np.mean((u - c) ** 2),
            "sample": np.mean((u - u.mean()) ** 2),
            "reference": np.mean((u - u.mean()) ** 2),  # shiftable channel
            "raw": np.mean(u**2),
        }
        for mode, val in expect.items():
            rep = finalize(acc, centering=mode)
            assert rep["m2"].value == pytest.approx(val, rel=1e-12)
            # mean target undoes the ingest center via its offset in all modes
            assert rep["mean_u"].value == pytest.approx(u.mean(), rel=1e-12)

    def test_reference_mode_respects_non_shiftable(self):
        rng = np.random.default_rng(257)
        c = 0.9
        u = rng.standard_normal(300) + 2.0
        schema = MomentSchema(
            channels=(ChannelSpec("u", c, shiftable=False),),
            targets=(TargetSpec("m2", ((1, ("u", "u")),)),),
        )
        acc = MomentAccumulator(schema, batch_size=50)
        acc.add_batch(u[None, :].astype(complex))
        acc.add_batch(u[None, :].astype(complex))
        rep = finalize(acc, centering="reference")
        # stays referenced to the declared center, not the empirical mean
        assert rep["m2"].value == pytest.approx(np.mean((u - c) ** 2), rel=1e-12)

    def test_unknown_centering_rejected(self):
        acc = MomentAccumulator(scalar_schema())
        feed_scalars(acc, list(range(10)))
        acc.flush()
        feed_scalars(acc, list(range(10)))
        with pytest.raises(ValueError, match="centering"):
            finalize(acc, centering="bogus")


class TestMappingIdentities:
    def test_quadrature_amplitude_identity_synthetic(self):
        # q4 = 16 g^4 <da1 da1+ da2 da2+> and var_x0 + var_y0 =
        # 8 gamma_r g^2 <da0 da0+> hold exactly on any dataset
        rng = np.random.default_rng(263)
        params = ModelParams(mu=0.4, gamma_r=2.5, g=0.3)
        states = (rng.standard_normal((6, 20, 50))
                  + 1j * rng.standard_normal((6, 20, 50)))
        acc = MomentAccumulator(opo_schema(params))
        acc.add_batches(state_channels(states, params))
        for mode in ("sample", "none"):
            rep = finalize(acc, centering=mode)
            q4 = rep["q4"].value
            pair4 = rep["amp_n1n2"].value
            assert q4 == pytest.approx(16.0 * params.g**4 * pair4, rel=1e-12)
            v0 = rep["var_x0"].value + rep["var_y0"].value
            pump = rep["amp_n0"].value
            assert v0 == pytest.approx(
                8.0 * params.gamma_r * params.g**2 * pump, rel=1e-12)

    def test_accumulate_quadrature_samples_matches_channels(self):
        rng = np.random.default_rng(269)
        params = ModelParams(mu=0.4, gamma_r=2.5, g=0.3)
        states = (rng.standard_normal((6, 2, 32))
                  + 1j * rng.standard_normal((6, 2, 32)))
        via_channels = MomentAccumulator(opo_schema(params), batch_size=32)
        via_channels.add_batches(state_channels(states, params))
        via_samples = MomentAccumulator(opo_schema(params), batch_size=32)
        for j in range(2):
            for k in range(32):
                st = PhaseSpaceState(*(states[i, j, k] for i in range(6)))
                accumulate(via_samples, alpha_to_quadratures(st, params))
        ra = finalize(via_channels, "sample")
        rb = finalize(via_samples, "sample")
        for name in ("q4", "amp_n1n2", "t1", "s", "var_x0", "amp_triple"):
            assert ra[name].value == pytest.approx(rb[name].value,
                                                   rel=1e-10, abs=1e-12)


class TestOpoEnsembleMoments:
    def test_cov_y_yp_matches_ou_oracle(self, std_report, base_params):
        ou = ou_covariances(base_params)
        est = std_report["cov_y_yp"]
        assert abs(est.value.real - ou.yyp) <= 3.0 * est.std_error
        assert est.value.real < 0

    def test_pump_signal_pairs_vanish(self, std_report):
        for name in ("cov_x0_x", "cov_x0_y", "cov_y0_x", "cov_y0_y"):
            est = std_report[name]
            assert abs(est.value.real) <= 3.0 * est.std_error, name

    def test_report_metadata(self, std_report):
        assert std_report.n_samples == 256 * 64
        assert std_report.n_batches == 256
        assert std_report.centering == "reference"
        assert std_report.label == "monte-carlo"
        assert std_report["t1"].low_confidence is False
        d = std_report.to_dict()
        assert d["n_samples"] == 256 * 64
        assert "t1" in d["moments"]

    def test_unknown_target_raises(self, std_report):
        with pytest.raises(SchemaError):
            std_report["nonexistent_moment"]
        assert "nonexistent_moment" not in std_report


class TestSchemaValidation:
    def test_channel_count_mismatch(self):
        acc = MomentAccumulator(two_channel_schema())
        with pytest.raises(SchemaError):
            acc.add_batch(np.zeros((3, 5)))
        with pytest.raises(SchemaError):
            acc.add_sample([1.0])

    def test_amplitude_schema_needs_six_centers(self):
        with pytest.raises(SchemaError):
            amplitude_schema(centers=(0.0,) * 5)

    def test_batch_size_validation(self):
        with pytest.raises(ValueError):
            MomentAccumulator(scalar_schema(), batch_size=0)
