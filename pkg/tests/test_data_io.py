import os

import numpy as np
import pytest

from krylovsketch import (
    ArgumentError,
    DenseMatrix,
    ParseError,
    SparseMatrix,
    SparseSpec,
    SyntheticSpec,
    decay_profile,
    gen_dense,
    gen_sparse,
    load_csv_dense,
    load_libsvm,
    write_csv,
    write_libsvm,
)

from conftest import random_dense, random_sparse


class TestDecayProfile:
    def test_linear(self):
        np.testing.assert_allclose(decay_profile("linear", 4), [1.0, 0.75, 0.5, 0.25])

    def test_fast(self):
        np.testing.assert_allclose(decay_profile("fast", 4), [0.5, 0.25, 0.125, 0.0625])

    def test_slow(self):
        np.testing.assert_allclose(decay_profile("slow", 3), [1.0, 2**-0.5, 3**-0.5])

    def test_unknown(self):
        with pytest.raises(ArgumentError):
            decay_profile("step", 3)


class TestGenDense:
    def test_shape_and_determinism(self):
        spec = SyntheticSpec(n=50, d=20, k=5, zeta=10, decay="linear", seed=4)
        a = gen_dense(spec)
        b = gen_dense(spec)
        assert a.shape == (50, 20)
        np.testing.assert_array_equal(a.data, b.data)
        c = gen_dense(SyntheticSpec(n=50, d=20, k=5, zeta=10, decay="linear", seed=5))
        assert not np.array_equal(a.data, c.data)

    def test_noiseless_limit_has_rank_k(self):
        a = gen_dense(SyntheticSpec(n=200, d=40, k=6, zeta=1e12, seed=1))
        s = np.linalg.svd(a.data, compute_uv=False)
        assert s[6] / s[0] <= 1e-10

    def test_linear_profile_singular_values(self):
        # noiseless signal: sigma_i of S diag(D) U concentrates near sqrt(n) D_ii
        n, k = 3000, 10
        a = gen_dense(SyntheticSpec(n=n, d=50, k=k, zeta=1e12, decay="linear", seed=2))
        s = np.linalg.svd(a.data, compute_uv=False)[:k]
        want = np.sqrt(n) * decay_profile("linear", k)
        assert np.all(np.abs(s - want) <= 0.10 * want)

    def test_spectrum_monotone(self):
        a = gen_dense(SyntheticSpec(n=400, d=120, k=40, zeta=10, seed=3))
        s = np.linalg.svd(a.data, compute_uv=False)
        assert np.all(np.diff(s) <= 1e-12)

    def test_spec_validation(self):
        with pytest.raises(ArgumentError):
            SyntheticSpec(n=10, d=10, k=11)
        with pytest.raises(ArgumentError):
            SyntheticSpec(n=10, d=10, k=2, zeta=0.0)
        with pytest.raises(ArgumentError):
            SyntheticSpec(n=10, d=10, k=2, decay="exp")


class TestGenSparse:
    def test_nnz_band(self):
        sp = gen_sparse(SparseSpec(n=1000, d=2000, density=0.001, seed=6))
        mean = 1000 * 2000 * 0.001
        sigma = np.sqrt(1000 * 2000 * 0.001 * 0.999)
        assert abs(sp.nnz - mean) <= 4 * sigma

    def test_full_density(self):
        sp = gen_sparse(SparseSpec(n=5, d=8, density=1.0, seed=7))
        assert sp.nnz == 40
        assert np.all(sp.values > 0.0) and np.all(sp.values <= 1.0)

    def test_deterministic(self):
        a = gen_sparse(SparseSpec(n=30, d=40, density=0.1, seed=8))
        b = gen_sparse(SparseSpec(n=30, d=40, density=0.1, seed=8))
        np.testing.assert_array_equal(a.col_idx, b.col_idx)
        np.testing.assert_array_equal(a.values, b.values)

    def test_values_in_unit_interval(self):
        sp = gen_sparse(SparseSpec(n=200, d=100, density=0.05, seed=9))
        assert np.all(sp.values > 0.0) and np.all(sp.values <= 1.0)

    def test_spec_validation(self):
        with pytest.raises(ArgumentError):
            SparseSpec(n=10, d=10, density=0.0)
        with pytest.raises(ArgumentError):
            SparseSpec(n=0, d=10)


class TestCsv:
    def test_small_round_trip(self, tmp_path):
        path = str(tmp_path / "m.csv")
        m = DenseMatrix([[1.5, -2.25], [1e-300, 3.0]])
        write_csv(path, m)
        back = load_csv_dense(path)
        np.testing.assert_array_equal(back.data, m.data)

    def test_scientific_notation_parsed(self, tmp_path):
        path = tmp_path / "sci.csv"
        path.write_text("1e3,-2.5E-4\n7,0\n")
        m = load_csv_dense(str(path))
        np.testing.assert_array_equal(m.data, [[1000.0, -0.00025], [7.0, 0.0]])

    def test_large_resave_byte_identical(self, tmp_path):
        m = random_dense(1000, 1000, 10)
        p1 = str(tmp_path / "a.csv")
        p2 = str(tmp_path / "b.csv")
        write_csv(p1, m)
        write_csv(p2, load_csv_dense(p1))
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_header_flag(self, tmp_path):
        path = str(tmp_path / "h.csv")
        m = DenseMatrix([[1.0, 2.0]])
        write_csv(path, m, header=["x", "y"])
        text = open(path).read()
        assert text.startswith("x,y\n")
        back = load_csv_dense(path, header=True)
        np.testing.assert_array_equal(back.data, m.data)
        with pytest.raises(ParseError):
            load_csv_dense(path)

    def test_ragged_reports_line(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("1,2\n3,4,5\n")
        with pytest.raises(ParseError, match="line 2"):
            load_csv_dense(str(path))

    def test_bad_number_reports_line(self, tmp_path):
        path = tmp_path / "n.csv"
        path.write_text("1,2\n3,abc\n")
        with pytest.raises(ParseError, match="line 2"):
            load_csv_dense(str(path))

    def test_empty_file(self, tmp_path):
        path = tmp_path / "e.csv"
        path.write_text("")
        with pytest.raises(ParseError):
            load_csv_dense(str(path))


class TestLibsvm:
    def test_toy_file(self, tmp_path):
        path = tmp_path / "toy.svm"
        path.write_text("1 1:0.5 3:2.0\n0 2:1.0\n")
        sp = load_libsvm(str(path))
        assert sp.shape == (2, 3)
        assert sp.nnz == 3
        np.testing.assert_array_equal(
            sp.to_dense().data, [[0.5, 0.0, 2.0], [0.0, 1.0, 0.0]]
        )

    def test_labels_discarded(self, tmp_path):
        path = tmp_path / "lab.svm"
        path.write_text("-1 1:1.0\n+1 1:2.0\n3.5 1:3.0\n")
        sp = load_libsvm(str(path))
        np.testing.assert_array_equal(sp.values, [1.0, 2.0, 3.0])

    def test_round_trip(self, tmp_path):
        sp = random_sparse(40, 25, 0.15, 11)
        p1 = str(tmp_path / "a.svm")
        p2 = str(tmp_path / "b.svm")
        write_libsvm(p1, sp)
        back = load_libsvm(p1, n_cols=25)
        np.testing.assert_array_equal(back.row_ptr, sp.row_ptr)
        np.testing.assert_array_equal(back.col_idx, sp.col_idx)
        np.testing.assert_array_equal(back.values, sp.values)
        write_libsvm(p2, back)
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_nonincreasing_index_reports_line(self, tmp_path):
        path = tmp_path / "bad.svm"
        path.write_text("0 1:1.0 3:1.0\n0 2:1.0 2:5.0\n")
        with pytest.raises(ParseError, match="line 2"):
            load_libsvm(str(path))

    def test_zero_based_index_rejected(self, tmp_path):
        path = tmp_path / "zero.svm"
        path.write_text("0 0:1.0\n")
        with pytest.raises(ParseError, match="1-based"):
            load_libsvm(str(path))

    def test_malformed_token(self, tmp_path):
        path = tmp_path / "tok.svm"
        path.write_text("0 1:1.0\n0 5\n")
        with pytest.raises(ParseError, match="line 2"):
            load_libsvm(str(path))

    def test_nonfinite_value_rejected(self, tmp_path):
        path = tmp_path / "inf.svm"
        path.write_text("0 1:nan\n")
        with pytest.raises(ParseError):
            load_libsvm(str(path))

    def test_explicit_zero_dropped(self, tmp_path):
        path = tmp_path / "z.svm"
        path.write_text("0 1:0.0 2:3.0\n")
        sp = load_libsvm(str(path))
        assert sp.nnz == 1
        assert sp.values[0] == 3.0

    def test_column_truncation(self, tmp_path):
        path = tmp_path / "wide.svm"
        path.write_text("0 1:1.0 5:2.0 9:3.0\n0 2:4.0\n")
        sp = load_libsvm(str(path), n_cols=3)
        assert sp.shape == (2, 3)
        np.testing.assert_array_equal(sp.to_dense().data, [[1.0, 0.0, 0.0], [0.0, 4.0, 0.0]])

    def test_rows_without_features_keep_row_count(self, tmp_path):
        path = tmp_path / "gap.svm"
        path.write_text("0\n0 2:1.0\n0\n")
        sp = load_libsvm(str(path))
        assert sp.shape == (3, 2)
        assert sp.nnz == 1

    @pytest.mark.skipif(
        "SKETCH_W8A_PATH" not in os.environ, reason="set SKETCH_W8A_PATH to run"
    )
    def test_w8a_shape(self):
        sp = load_libsvm(os.environ["SKETCH_W8A_PATH"], n_cols=300)
        assert sp.shape == (64700, 300)
        density = sp.nnz / (sp.rows * sp.cols)
        assert abs(density - 0.0388) <= 0.002
