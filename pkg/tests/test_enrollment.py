import numpy as np
import pytest

from pufbind.bitops import derive_seed
from pufbind.enrollment import (
    SamplingPlan,
    collect_samples,
    enroll,
    find_stable_window,
    record_from_dicts,
    secret_to_dict,
    verify_enrollment,
)
from pufbind.errors import EnrollmentError, ParameterError
from pufbind.fuzzy_extractor import helper_to_dict, unlock
from pufbind.sram_sim import Temperature, clone_device, new_device, startup


def _samples(rows):
    return [np.array(r, dtype=np.uint8) for r in rows]


def test_plan_validation():
    with pytest.raises(ParameterError):
        SamplingPlan(startups_per_temperature=0)
    with pytest.raises(ParameterError):
        SamplingPlan(temperatures=())


def test_identical_samples_all_stable():
    rows = _samples([[1, 0, 1, 1, 0, 0, 1, 0]] * 5)
    offset, sm, b = find_stable_window(rows, 8, 0.999)
    assert offset == 0
    assert sm.tolist() == [1] * 8
    assert b.tolist() == [1, 0, 1, 1, 0, 0, 1, 0]


def test_half_flipping_bit_unstable():
    rows = _samples([[1, 0, 0, 1], [1, 1, 0, 1], [1, 0, 0, 1], [1, 1, 0, 1]])
    offset, sm, b = find_stable_window(rows, 4, 0.999)
    assert sm.tolist() == [1, 0, 1, 1]
    assert b.tolist() == [1, 0, 0, 1]  # unstable position forced to 0


def test_window_ties_take_lowest_offset():
    rows = _samples([[1, 1, 0, 1, 1], [1, 1, 1, 1, 1]])  # bit 2 unstable
    offset, sm, b = find_stable_window(rows, 2, 0.999)
    assert offset == 0


def test_window_picks_densest_stretch():
    base = [1, 0] * 8
    noisy = list(base)
    noisy[0] ^= 1
    noisy[3] ^= 1
    rows = _samples([base, noisy, base, noisy])
    offset, sm, b = find_stable_window(rows, 4, 0.999)
    assert offset == 4
    assert sm.tolist() == [1, 1, 1, 1]


def test_no_stable_bit_is_an_error():
    rows = _samples([[0, 0], [1, 1], [0, 1], [1, 0]])
    with pytest.raises(EnrollmentError):
        find_stable_window(rows, 1, 0.999)


def test_threshold_monotonicity():
    dev = new_device(1)
    samples = collect_samples(dev, SamplingPlan(startups_per_temperature=60), seed=3)
    _, loose, _ = find_stable_window(samples, dev.cell_count, 0.95)
    _, strict, _ = find_stable_window(samples, dev.cell_count, 0.999)
    assert ((strict == 1) <= (loose == 1)).all()


def test_window_stability_fraction_frozen():
    # frozen oracle: device 1, 1,000 ROOM samples, threshold 0.999
    dev = new_device(1)
    samples = collect_samples(dev, SamplingPlan(startups_per_temperature=1000), seed=0)
    offset, sm, _ = find_stable_window(samples, 32, 0.999)
    assert (offset, int(sm.sum())) == (2836, 26)
    assert sm.sum() / 32 >= 0.80
    # at sz=64 the densest window of this device carries 48 stable bits
    offset, sm, _ = find_stable_window(samples, 64, 0.999)
    assert (offset, int(sm.sum())) == (2996, 48)


def test_enroll_regression_and_verify():
    # frozen oracle: device 1, sz=64, hd=2, 500 ROOM samples
    dev = new_device(1)
    rec = enroll(dev, SamplingPlan(startups_per_temperature=500), sz=64, hd=2, seed=0)
    assert (rec.offset, int(rec.sm.sum())) == (2839, 45)
    assert len(rec.key) == 18
    report = verify_enrollment(dev, rec, trials=200, seed=1)
    assert report.failures == 0
    assert report.failure_rate < 0.01
    assert report.passed


def test_clone_cannot_verify():
    dev = new_device(1)
    rec = enroll(dev, SamplingPlan(startups_per_temperature=500), sz=64, hd=2, seed=0)
    report = verify_enrollment(clone_device(dev, 77), rec, trials=100, seed=2)
    assert report.failure_rate == 1.0
    assert not report.passed


def test_enroll_reproducible(small_device):
    plan = SamplingPlan(startups_per_temperature=40)
    a = enroll(small_device, plan, sz=64, hd=2, seed=0)
    b = enroll(small_device, plan, sz=64, hd=2, seed=0)
    assert a.offset == b.offset
    assert np.array_equal(a.sm, b.sm)
    assert np.array_equal(a.b, b.b)
    assert a.key == b.key
    assert helper_to_dict(a.helper) == helper_to_dict(b.helper)


def test_small_record_frozen(small_record):
    assert (small_record.offset, int(small_record.sm.sum())) == (380, 58)


def test_masked_reference_invariant(small_record):
    assert ((small_record.b & small_record.sm) == small_record.b).all()


def test_noiseless_unlock_always_succeeds(noiseless_device):
    rec = enroll(
        noiseless_device, SamplingPlan(startups_per_temperature=2), sz=32, hd=1, seed=1
    )
    for i in range(20):
        bits = startup(noiseless_device, Temperature.ROOM, derive_seed("nl", i)).bits
        window = bits[rec.offset : rec.offset + rec.sz]
        assert unlock(rec.helper, window) == rec.key


def test_key_length_floor():
    dev = new_device(2, cell_count=256)
    with pytest.raises(ParameterError):
        enroll(dev, SamplingPlan(startups_per_temperature=5), sz=32, hd=1, key_len=16)


def test_mask_cap_guard():
    dev = new_device(2, cell_count=256)
    with pytest.raises(EnrollmentError):
        enroll(dev, SamplingPlan(startups_per_temperature=5), sz=256, hd=4)


def test_verify_cycles_through_plan_temperatures():
    dev = new_device(6, cell_count=1024)
    plan = SamplingPlan(
        startups_per_temperature=40,
        temperatures=(Temperature.LOW, Temperature.ROOM, Temperature.HIGH),
    )
    rec = enroll(dev, plan, sz=32, hd=2, seed=0)
    report = verify_enrollment(dev, rec, trials=60, cutoff=0.05, seed=5)
    assert report.trials == 60
    assert report.passed


def test_record_round_trip(small_device, small_record):
    helper_doc = helper_to_dict(small_record.helper)
    secret_doc = secret_to_dict(small_record)
    rebuilt = record_from_dicts(helper_doc, secret_doc)
    assert rebuilt.key == small_record.key
    assert rebuilt.offset == small_record.offset
    assert np.array_equal(rebuilt.sm, small_record.sm)
    report = verify_enrollment(small_device, rebuilt, trials=30, seed=9)
    assert report.failures == 0
