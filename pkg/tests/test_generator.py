import numpy as np
import pytest

from wcelab.errors import ConfigInvalidError
from wcelab.generator import (
    GeneratorConfig,
    gen_instance,
    perturb_nonmeasurable,
    random_point_map,
    rotation_config,
)
from wcelab.instance_io import instance_digest, serialize_instance
from wcelab.measure import finest_partition, is_measurable, make_space, support
from wcelab.measure import MeasurableFunction
from wcelab.opalgebra import operator_norm, weighted_adjoint
from wcelab.wce import build_operator, partial_isometry_criterion


class TestConfigValidation:
    @pytest.mark.parametrize("kwargs", [
        {"n": 1},
        {"n": 65},
        {"n": 4, "block_count": 0},
        {"n": 4, "block_count": 5},
        {"weight_range": (0.0, 1.0)},
        {"weight_range": (2.0, 1.0)},
        {"magnitude_range": (-1.0, 4.0)},
        {"magnitude_range": (0.0, 0.0)},
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ConfigInvalidError):
            gen_instance(GeneratorConfig(seed=1, **kwargs))


class TestDeterminism:
    def test_same_seed_same_bytes(self):
        cfg = GeneratorConfig(seed=1, n=10, block_count=4, with_point_map=True)
        a = gen_instance(cfg)
        b = gen_instance(cfg)
        assert serialize_instance(a) == serialize_instance(b)
        assert a == b

    def test_different_seeds_differ(self):
        a = gen_instance(GeneratorConfig(seed=1))
        b = gen_instance(GeneratorConfig(seed=2))
        assert instance_digest(a) != instance_digest(b)

    def test_point_map_determinism(self):
        sp = make_space([1.0] * 5)
        assert random_point_map(sp, 3) == random_point_map(sp, 3)
        assert random_point_map(sp, 3) != random_point_map(sp, 4)


class TestRanges:
    def test_weights_and_magnitudes_in_range(self):
        for seed in range(1, 30):
            inst = gen_instance(rotation_config(seed)).instance
            w = inst.space.weights
            assert np.all((0.1 <= w) & (w <= 10.0))
            assert np.all(np.abs(inst.u.values) <= 4.0 + 1e-12)
            assert np.all(np.abs(inst.w.values) <= 4.0 + 1e-12)
            assert 2 <= inst.space.n <= 24

    def test_rotation_covers_all_modes(self):
        variants = {s % 5 for s in range(1, 30)}
        assert variants == {0, 1, 2, 3, 4}
        cfgs = [rotation_config(s) for s in range(1, 30)]
        assert any(c.zero_blocks for c in cfgs)
        assert any(c.constant_u for c in cfgs)
        assert any(c.measurable_u for c in cfgs)
        assert any(c.partial_isometry for c in cfgs)


class TestModes:
    def test_measurable_u(self):
        for seed in range(5):
            inst = gen_instance(GeneratorConfig(
                seed=seed, n=9, block_count=3, measurable_u=True)).instance
            assert is_measurable(inst.u, inst.partition)

    def test_constant_u(self):
        inst = gen_instance(GeneratorConfig(
            seed=4, n=7, block_count=3, constant_u=True)).instance
        assert np.all(inst.u.values == inst.u.values[0])
        assert abs(inst.u.values[0]) >= 0.9  # constant stays away from zero

    def test_zero_blocks_gives_proper_support(self):
        hits = 0
        for seed in range(20):
            inst = gen_instance(GeneratorConfig(
                seed=seed, n=10, block_count=4, zero_blocks=True)).instance
            s = support(MeasurableFunction(inst.space, inst.eu2))
            if len(s) < inst.space.n:
                hits += 1
            assert s == inst.s_set
        assert hits == 20  # every zero_blocks instance has a strict subset

    def test_partial_isometry_mode(self):
        for seed in range(10):
            inst = gen_instance(GeneratorConfig(
                seed=seed, n=8, block_count=3, partial_isometry=True)).instance
            is_pi, members = partial_isometry_criterion(inst)
            assert is_pi
            assert members == inst.sg_set
            t = build_operator(inst)
            residual = operator_norm(t @ weighted_adjoint(t) @ t - t)
            assert residual <= 1e-8 * max(1.0, operator_norm(t))

    def test_block_aggregates_floored(self):
        # Non-zeroed blocks keep their quadratic aggregate above the floor
        # so rank cutoffs stay far from the spectrum.
        for seed in range(10):
            inst = gen_instance(GeneratorConfig(seed=seed, n=12, block_count=4)).instance
            for b in inst.partition.blocks:
                assert inst.eu2[b[0]] >= 0.04
                assert inst.ew2[b[0]] >= 0.04


class TestPerturbation:
    def test_breaks_measurability(self):
        inst = gen_instance(GeneratorConfig(
            seed=9, n=8, block_count=3, measurable_u=True)).instance
        bad = perturb_nonmeasurable(inst, 1)
        assert not is_measurable(bad.u, bad.partition)

    def test_requires_multipoint_block(self):
        inst = gen_instance(GeneratorConfig(seed=9, n=4, block_count=4)).instance
        assert inst.partition == finest_partition(inst.space)
        with pytest.raises(ValueError):
            perturb_nonmeasurable(inst, 1)
