# tests/test_word.py
import pytest
from hypothesis import given, strategies as st

from src.models.word import (
    Letter,
    Word,
    cyclic_reduce,
    is_infinite_order,
    normalize,
    permutation_image,
)
from src.utils.errors import InvalidWordError

words = st.text(alphabet="abB", max_size=30).map(Word.parse)


class TestParsing:
    def test_ascii_syntax(self):
        w = Word.parse("ab aB")
        assert w.letters == (Letter.A, Letter.B, Letter.A, Letter.BINV)
        assert str(w) == "abaB"
        assert w.pretty() == "a b a b⁻¹"

    def test_bad_letter(self):
        with pytest.raises(InvalidWordError):
            Word.parse("abc")

    def test_generator_list(self):
        assert Word.parse_list("abaB, babab") == ["abaB", "babab"]
        assert Word.parse_list(" , a") == ["a"]


class TestNormalize:
    @pytest.mark.parametrize(
        "raw, expected",
        [
            ("", ""),
            ("aa", ""),
            ("bb", "B"),
            ("BB", "b"),
            ("bbb", ""),
            ("bB", ""),
            ("abbba", ""),
            ("abbab", "aBab"),
            ("abaB", "abaB"),
        ],
    )
    def test_examples(self, raw, expected):
        assert normalize(Word.parse(raw)) == expected

    @given(words)
    def test_result_is_normal_and_stable(self, w):
        n = normalize(w)
        assert n.is_normal
        assert normalize(n) == n

    @given(words)
    def test_inverse_cancels(self, w):
        assert len(w * ~w) == 0
        assert len((~w) * w) == 0

    @given(words)
    def test_same_permutation_image(self, w):
        assert permutation_image(normalize(w)) == permutation_image(w)

    @given(words, words)
    def test_product_is_homomorphic(self, u, v):
        # letters act on the right, so the image of uv is image(u) then image(v)
        pu, pv = permutation_image(u), permutation_image(v)
        composed = tuple(pv[pu[i]] for i in range(3))
        assert permutation_image(u * v) == composed


class TestPowers:
    def test_relators(self):
        assert len(Word.parse("a") ** 2) == 0
        assert len(Word.parse("b") ** 3) == 0
        assert Word.parse("ab") ** 2 == "abab"
        assert Word.parse("ab") ** -1 == "Ba"


class TestCyclicReduce:
    def test_peels_matching_ends(self):
        x, u = cyclic_reduce(Word.parse("Babab"))
        assert (x, u) == ("Ba", "b")

    def test_equal_b_ends(self):
        x, u = cyclic_reduce(Word.parse("BabaB"))
        assert (x, u) == ("B", "abab")

    def test_already_reduced(self):
        assert cyclic_reduce(Word.parse("ab")) == (Word(), Word.parse("ab"))
        assert cyclic_reduce(Word()) == (Word(), Word())

    @given(words)
    def test_conjugation_identity(self, w):
        n = normalize(w)
        x, u = cyclic_reduce(n)
        assert u.is_cyclically_reduced
        assert n[: len(x)] == x
        assert normalize(Word(x.letters + u.letters + (~x).letters)) == n


class TestOrder:
    @pytest.mark.parametrize("raw", ["", "a", "b", "B", "aba", "baB", "abaBa"])
    def test_torsion(self, raw):
        assert not is_infinite_order(Word.parse(raw))

    @pytest.mark.parametrize("raw", ["ab", "aB", "abab", "bab", "abaB"])
    def test_infinite(self, raw):
        assert is_infinite_order(Word.parse(raw))
