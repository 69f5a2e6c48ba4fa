import numpy as np
import pytest

from ersteg.codes import PolarStegoCode, StegoCode, SyndromeTrellisCode, make_code
from ersteg.errors import UsageError
from ersteg.spc import l_m_polar
from ersteg.stc import l_m_stc, make_submatrix


class TestFactory:
    def test_names(self):
        assert make_code("spc").name == "spc"
        assert make_code("stc").name == "stc"

    def test_rejects_unknown(self):
        with pytest.raises(UsageError):
            make_code("hamming")

    def test_protocol_conformance(self):
        assert isinstance(make_code("spc"), StegoCode)
        assert isinstance(make_code("stc"), StegoCode)


class TestPolarCode:
    def test_coded_length_truncates_to_power_of_two(self):
        c = PolarStegoCode()
        assert c.coded_length(4096) == 4096
        assert c.coded_length(5000) == 4096
        assert c.coded_length(255) == 128
        assert c.coded_length(1) == 1

    def test_lm_delegates(self):
        assert PolarStegoCode().l_m(4096, 38) == l_m_polar(4096, 38)

    def test_rng_is_ignored(self, rng):
        c = PolarStegoCode()
        cover = rng.integers(0, 2, 64, dtype=np.uint8)
        rho = rng.uniform(0.1, 2.0, 64)
        msg = rng.integers(0, 2, 9, dtype=np.uint8)
        a = c.embed(cover, rho, msg, np.random.default_rng(1))
        b = c.embed(cover, rho, msg, np.random.default_rng(2))
        assert np.array_equal(a, b)
        assert np.array_equal(c.extract(a, 9, None), msg)


class TestTrellisCode:
    def test_coded_length_is_identity(self):
        c = SyndromeTrellisCode()
        assert c.coded_length(4096) == 4096
        assert c.coded_length(271) == 271

    def test_lm_delegates(self):
        assert SyndromeTrellisCode(height=10).l_m(4096, 38) == l_m_stc(4096, 38, 10)

    def test_shared_rng_roundtrip(self, rng):
        c = SyndromeTrellisCode()
        n, m = 60, 6
        cover = rng.integers(0, 2, n, dtype=np.uint8)
        rho = rng.uniform(0.1, 2.0, n)
        msg = rng.integers(0, 2, m, dtype=np.uint8)
        y = c.embed(cover, rho, msg, np.random.default_rng(7))
        assert np.array_equal(c.extract(y, m, np.random.default_rng(7)), msg)

    def test_different_rngs_draw_different_submatrices(self):
        a = make_submatrix(10, 10, np.random.default_rng(1))
        b = make_submatrix(10, 10, np.random.default_rng(2))
        assert not np.array_equal(a.bits, b.bits)

    def test_zero_payload(self, rng):
        c = SyndromeTrellisCode()
        cover = rng.integers(0, 2, 16, dtype=np.uint8)
        y = c.embed(cover, np.ones(16), np.zeros(0, np.uint8), np.random.default_rng(0))
        assert np.array_equal(y, cover)
        assert c.extract(y, 0, np.random.default_rng(0)).size == 0
