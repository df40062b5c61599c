"""
Unit tests for the instance_io module.

Validates:
- Instances survive a write and read with every feasibility kind
- Files are byte-reproducible and the hash is stable
- Malformed input names the offending key path
- Edge-list parsing for the command line
"""

import json
import os
import tempfile
import unittest
from typing import Optional

from src.errors import InstanceFormatError
from src.instance_io import (
    dump_instance,
    instance_hash,
    instance_text,
    load_instance,
    parse_edge_list,
    prior_from_dict,
    prior_to_dict,
)
from src.model import FeasibilityFamily, HypergraphPrior
from src.random_priors import random_prior


def sample_prior(family: Optional[FeasibilityFamily] = None) -> HypergraphPrior:
    return HypergraphPrior.create(
        3,
        [((0,), {0.0: 0.25, 1.5: 0.75}), ((1, 2), {0.0: 0.5, 4.0: 0.5})],
        family,
    )


class TestRoundTrip(unittest.TestCase):
    """Tests for dump_instance and load_instance."""

    def test_file_round_trip(self) -> None:
        """A dumped prior loads back equal, with its metadata."""
        meta = {"kind": "random", "params": {"seed": 7}}
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "nested", "inst.json")
            dump_instance(sample_prior(), path, meta)
            prior, loaded_meta = load_instance(path)
        self.assertEqual(prior, sample_prior())
        self.assertEqual(loaded_meta, meta)

    def test_feasibility_kinds(self) -> None:
        """Cardinality and explicit families are kept."""
        for family in (FeasibilityFamily.cardinality(1), FeasibilityFamily.explicit([[0, 1], [2]])):
            prior = HypergraphPrior.create(3, [((0,), {0.0: 0.5, 1.0: 0.5})], family)
            parsed, _ = prior_from_dict(json.loads(instance_text(prior)))
            self.assertEqual(parsed.feasibility, family)
            self.assertEqual(parsed, prior)

    def test_random_priors(self) -> None:
        """Random priors, probabilities included, come back unchanged."""
        for seed in range(20):
            prior = random_prior(seed)
            parsed, _ = prior_from_dict(json.loads(instance_text(prior)))
            self.assertEqual(parsed, prior, seed)

    def test_text_is_reproducible(self) -> None:
        """Sorted keys and a trailing newline."""
        text = instance_text(sample_prior())
        self.assertEqual(text, instance_text(sample_prior()))
        self.assertTrue(text.endswith("\n"))
        data = json.loads(text)
        self.assertEqual(sorted(data), ["edges", "feasibility", "m"])
        self.assertEqual(data["edges"][0]["support"], [{"prob": 0.25, "value": 0.0}, {"prob": 0.75, "value": 1.5}])
        self.assertEqual(data["edges"][1]["items"], [1, 2])


class TestInstanceHash(unittest.TestCase):
    """Tests for instance_hash."""

    def test_stable_and_sensitive(self) -> None:
        """Same prior, same hash; a different meta changes it."""
        first = instance_hash(sample_prior())
        self.assertEqual(first, instance_hash(sample_prior()))
        self.assertEqual(len(first), 16)
        self.assertNotEqual(first, instance_hash(sample_prior(), {"kind": "lb"}))
        self.assertNotEqual(first, instance_hash(sample_prior(FeasibilityFamily.cardinality(1))))


class TestValidation(unittest.TestCase):
    """Tests for prior_from_dict and load_instance errors."""

    def assert_error_mentions(self, data, fragment: str) -> None:
        with self.assertRaises(InstanceFormatError) as ctx:
            prior_from_dict(data)
        self.assertIn(fragment, str(ctx.exception))

    def test_missing_key(self) -> None:
        """A missing m is reported with its path."""
        data = prior_to_dict(sample_prior())
        del data["m"]
        self.assert_error_mentions(data, "instance.m: missing")

    def test_minimal_document_loads(self) -> None:
        """m, feasibility and edges alone are a complete instance."""
        data = {
            "m": 2,
            "feasibility": {"kind": "all"},
            "edges": [{"items": [0], "support": [{"value": 1, "prob": 0.5}, {"value": 2, "prob": 0.5}]}],
        }
        prior, meta = prior_from_dict(data)
        self.assertEqual(prior, HypergraphPrior.create(2, [((0,), {1.0: 0.5, 2.0: 0.5})]))
        self.assertEqual(meta, {})

    def test_minimal_file_loads(self) -> None:
        """A hand-written file without meta loads from disk."""
        text = '{"m": 2, "feasibility": {"kind": "cardinality", "k": 1}, "edges": [{"items": [1], "support": [{"value": 0, "prob": 0.25}, {"value": 3, "prob": 0.75}]}]}'
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "hand.json")
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(text)
            prior, _ = load_instance(path)
        self.assertEqual(prior.feasibility, FeasibilityFamily.cardinality(1))
        self.assertEqual(prior.edges[0][1].support, (0.0, 3.0))

    def test_support_point_keys(self) -> None:
        """Each support point needs a value and a prob."""
        data = prior_to_dict(sample_prior())
        data["edges"][0]["support"] = [{"value": 1.0}]
        self.assert_error_mentions(data, "instance.edges[0].support[0].prob: missing")

    def test_bad_distribution(self) -> None:
        """Probabilities that do not sum to one name the edge."""
        data = prior_to_dict(sample_prior())
        data["edges"][0]["support"] = [{"value": 0.0, "prob": 0.5}, {"value": 1.0, "prob": 0.6}]
        self.assert_error_mentions(data, "instance.edges[0].support")

    def test_bad_pair(self) -> None:
        """A support point holds two numbers."""
        data = prior_to_dict(sample_prior())
        data["edges"][1]["support"] = [{"value": 0.0, "prob": "half"}]
        self.assert_error_mentions(data, "instance.edges[1].support[0].prob: expected a number")

    def test_item_out_of_range(self) -> None:
        """Items must lie in [0, m)."""
        data = prior_to_dict(sample_prior())
        data["edges"][0]["items"] = [5]
        self.assert_error_mentions(data, "outside")

    def test_unknown_feasibility(self) -> None:
        """Only the three feasibility kinds parse."""
        data = prior_to_dict(sample_prior())
        data["feasibility"] = {"kind": "matroid"}
        self.assert_error_mentions(data, "feasibility.kind")

    def test_not_an_object(self) -> None:
        """The top level must be an object."""
        self.assert_error_mentions([], "instance: expected an object")

    def test_missing_and_corrupt_files(self) -> None:
        """Unreadable or non-JSON files are format errors."""
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(InstanceFormatError):
                load_instance(os.path.join(tmp, "absent.json"))
            path = os.path.join(tmp, "bad.json")
            with open(path, "w", encoding="utf-8") as handle:
                handle.write("{not json")
            with self.assertRaises(InstanceFormatError) as ctx:
                load_instance(path)
            self.assertIn("not valid JSON", str(ctx.exception))


class TestParseEdgeList(unittest.TestCase):
    """Tests for parse_edge_list."""

    def test_braced_and_plain(self) -> None:
        """Braces are optional."""
        self.assertEqual(parse_edge_list("{0};{0,1}"), [(0,), (0, 1)])
        self.assertEqual(parse_edge_list("0;0,1"), [(0,), (0, 1)])
        self.assertEqual(parse_edge_list("{2, 1}"), [(1, 2)])

    def test_empty_text(self) -> None:
        """No text, no edges."""
        self.assertEqual(parse_edge_list(""), [])

    def test_bad_edges(self) -> None:
        """Empty edges and non-integers are rejected."""
        for text in ("{}", "{a}", "0;;1"):
            with self.assertRaises(InstanceFormatError):
                parse_edge_list(text)


if __name__ == "__main__":
    unittest.main()
