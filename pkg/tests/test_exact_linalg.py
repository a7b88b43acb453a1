import random
import unittest
from fractions import Fraction

from app.errors import DimensionMismatchError
from app.exact_linalg import (
    RationalMatrix,
    Subspace,
    as_fraction,
    cokernel,
    image_basis,
    kernel_basis,
    member,
    rank,
    solve,
    unit_positions,
)


def random_matrix(rng, rows, cols, spread=3):
    return RationalMatrix.from_rows(
        [[rng.randint(-spread, spread) for _ in range(cols)] for _ in range(rows)]
    )


class TestFractions(unittest.TestCase):
    def test_exact_literals(self):
        self.assertEqual(as_fraction("1.5"), Fraction(3, 2))
        self.assertEqual(as_fraction("7/2"), Fraction(7, 2))
        self.assertEqual(as_fraction(3), Fraction(3))

    def test_rejects_inexact(self):
        with self.assertRaises(TypeError):
            as_fraction(1.5)
        with self.assertRaises(TypeError):
            as_fraction(True)
        for text in ("1e3", "nan", "inf"):
            with self.assertRaises(ValueError):
                as_fraction(text)


class TestRankNullity(unittest.TestCase):
    def setUp(self):
        self.rng = random.Random(20240517)

    def test_rank_plus_nullity(self):
        for _ in range(200):
            rows, cols = self.rng.randint(1, 7), self.rng.randint(1, 7)
            matrix = random_matrix(self.rng, rows, cols)
            kernel = kernel_basis(matrix)
            self.assertEqual(rank(matrix) + kernel.dim, cols)
            for vector in kernel.basis:
                self.assertTrue(all(x == 0 for x in matrix.apply(vector)))

    def test_rank_of_transpose(self):
        for _ in range(100):
            matrix = random_matrix(self.rng, self.rng.randint(1, 6), self.rng.randint(1, 6))
            self.assertEqual(rank(matrix), rank(matrix.transpose()))
            self.assertEqual(rank(matrix), image_basis(matrix).dim)

    def test_cokernel_dimension(self):
        for _ in range(100):
            rows, cols = self.rng.randint(1, 6), self.rng.randint(1, 6)
            matrix = random_matrix(self.rng, rows, cols)
            for prefer_first in (False, True):
                reps, projection = cokernel(matrix, prefer_first)
                self.assertEqual(reps.dim, rows - rank(matrix))
                self.assertTrue((projection @ matrix).is_zero())
                self.assertEqual(rank(projection), reps.dim)

    def test_kernel_basis_ignores_row_order(self):
        for _ in range(100):
            matrix = random_matrix(self.rng, self.rng.randint(1, 6), self.rng.randint(1, 6))
            rows = list(matrix.entries)
            self.rng.shuffle(rows)
            shuffled = RationalMatrix.from_rows(rows)
            self.assertEqual(kernel_basis(shuffled), kernel_basis(matrix))
            self.assertEqual(kernel_basis(shuffled).basis, kernel_basis(matrix).basis)

    def test_solve(self):
        for _ in range(100):
            matrix = random_matrix(self.rng, self.rng.randint(1, 5), self.rng.randint(1, 5))
            x = tuple(Fraction(self.rng.randint(-4, 4)) for _ in range(matrix.cols))
            solution = solve(matrix, matrix.apply(x))
            self.assertIsNotNone(solution)
            self.assertEqual(matrix.apply(solution), matrix.apply(x))


class TestSubspace(unittest.TestCase):
    def test_canonical_basis(self):
        first = Subspace.span([(1, 1, 0), (0, 1, 1)], 3)
        second = Subspace.span([(1, 2, 1), (2, 3, 1), (1, 0, -1)], 3)
        self.assertEqual(first, second)
        self.assertEqual(first.dim, 2)
        self.assertTrue(member(first, (3, 5, 2)))
        self.assertFalse(member(first, (1, 0, 0)))

    def test_echelon_entries_stay_exact(self):
        space = Subspace.span([(2, 4, 6), (1, 3, 0)], 3)
        self.assertEqual(space.basis, ((1, 0, 9), (0, 1, -3)))
        for row in space.basis:
            self.assertTrue(all(isinstance(x, Fraction) for x in row))
        third = Subspace.span([(3, 1)], 2)
        self.assertEqual(third.basis, ((Fraction(1), Fraction(1, 3)),))
        self.assertEqual(Subspace.span([], 3), Subspace.zero(3))
        self.assertEqual(Subspace.span([(0, 0)], 2).dim, 0)
        self.assertEqual(rank(RationalMatrix(0, 0, ())), 0)

    def test_join_and_containment(self):
        line = Subspace.span([(1, 0, 0)], 3)
        plane = Subspace.span([(0, 1, 0), (0, 0, 1)], 3)
        self.assertEqual(line.join(plane), Subspace.full(3))
        self.assertTrue(Subspace.full(3).contains_subspace(line))
        self.assertFalse(plane.contains_subspace(line))

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            Subspace.span([(1, 0)], 3)
        with self.assertRaises(DimensionMismatchError):
            RationalMatrix.identity(2) @ RationalMatrix.identity(3)

    def test_prefer_first_keeps_early_coordinates(self):
        # image spanned by e0 - e2: either e0 or e2 can represent the quotient
        matrix = RationalMatrix.from_columns([(1, 0, -1)], 3)
        reps, _ = cokernel(matrix, prefer_first=True)
        self.assertEqual(unit_positions(reps), [0, 1])
        reps, _ = cokernel(matrix, prefer_first=False)
        self.assertEqual(unit_positions(reps), [1, 2])


if __name__ == "__main__":
    unittest.main()
