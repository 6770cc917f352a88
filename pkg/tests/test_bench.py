from __future__ import annotations

import json

import pytest

from haas.bench import (BatterySpec, PRIME_SEEDS, SEEDS_10, SearchSpec, SummaryTable,
                        calibrate, export, run_battery, weight_variants)
from haas.catalog import DEFAULT_WEIGHTS
from haas.engine import RunConfig, run
from haas.errors import ConfigError


def _is_prime(n: int) -> bool:
    return n > 1 and all(n % d for d in range(2, int(n ** 0.5) + 1))


class TestSeedList:
    def test_thirty_primes_from_eleven(self):
        assert len(PRIME_SEEDS) == 30
        assert PRIME_SEEDS[0] == 11
        assert PRIME_SEEDS[-1] == 139
        assert all(_is_prime(s) for s in PRIME_SEEDS)
        assert list(PRIME_SEEDS) == sorted(PRIME_SEEDS)

    def test_ten_seed_prefix(self):
        assert SEEDS_10 == PRIME_SEEDS[:10]


SMALL = dict(seeds=(11, 13), domains=("software",))


class TestBatteries:
    def test_single_seed_single_strategy_row_matches_run(self):
        spec = BatterySpec(program="strategy_table", seeds=(11,),
                           domains=("software",), strategies=(("ai_only", False),))
        result = run_battery(spec)
        assert len(result.table.rows) == 1
        row = result.table.rows[0]
        direct = run(RunConfig(domain="software", scenario="standard_sprint",
                               strategy="ai_only", policies=False, seed=11))
        for col in ("objective", "lead_time", "quality", "cum_regret"):
            assert row[col] == pytest.approx(direct.aggregate[col])

    def test_battery_determinism(self):
        spec = BatterySpec(program="ladder", levels=("L0", "L2"), **SMALL)
        a = run_battery(spec).table.to_json()
        b = run_battery(spec).table.to_json()
        assert a == b

    def test_ladder_rows(self):
        spec = BatterySpec(program="ladder", levels=("L0", "L3"), **SMALL)
        table = run_battery(spec).table
        assert len(table.rows) == 2
        assert {r["level"] for r in table.rows} == {"L0", "L3"}

    def test_parallel_jobs_produce_identical_table(self):
        base = BatterySpec(program="ladder", levels=("L0", "L2"), **SMALL)
        parallel = BatterySpec(program="ladder", levels=("L0", "L2"), jobs=2, **SMALL)
        assert run_battery(base).table.to_json() == run_battery(parallel).table.to_json()

    def test_portability_marks_winner_per_scenario(self):
        spec = BatterySpec(program="portability", seeds=(11, 13),
                           domains=("manufacturing",),
                           scenarios=("standard_production", "scheduled_stop"),
                           levels=("L0", "L3"))
        table = run_battery(spec).table
        assert len(table.notes["winners"]) == 2
        best_rows = [r for r in table.rows if r["best"]]
        assert len(best_rows) == 2

    def test_wilcoxon_attached_to_strategy_table(self):
        spec = BatterySpec(program="strategy_table", seeds=tuple(PRIME_SEEDS[:8]),
                           domains=("software",),
                           strategies=(("ai_only", False), ("linucb", False)))
        table = run_battery(spec).table
        tests = table.notes["wilcoxon"]
        assert "software/standard_sprint" in tests
        assert tests["software/standard_sprint"]["n"] <= 8

    def test_contract_reports_screen_rates(self):
        spec = BatterySpec(program="contract", seeds=(11, 13),
                           domains=("manufacturing",),
                           strategies=(("linucb", True),))
        table = run_battery(spec).table
        assert {r["reward_profile"] for r in table.rows} == {
            "four_outcome", "cost_time", "quality_cost_time"}
        for row in table.rows:
            assert 0.0 <= row["acceptable_rate"] <= 1.0


class TestWeightVariants:
    def test_eleven_variants_all_normalised(self):
        variants = weight_variants()
        assert len(variants) == 11
        assert variants[0] == ("baseline", None)
        for name, weights in variants[1:]:
            assert sum(weights) == pytest.approx(1.0, abs=1e-9)


class TestExport:
    def test_json_round_trip(self, tmp_path):
        spec = BatterySpec(program="ladder", levels=("L0",), **SMALL)
        table = run_battery(spec).table
        path = export(table, "json", tmp_path / "summary.json")
        again = SummaryTable.from_json(path.read_text(encoding="utf-8"))
        assert again.to_json() == table.to_json()

    def test_csv_header_matches_columns(self, tmp_path):
        spec = BatterySpec(program="ladder", levels=("L0",), **SMALL)
        table = run_battery(spec).table
        path = export(table, "csv", tmp_path / "summary.csv")
        raw = path.read_bytes().decode("utf-8")
        assert "\r\n" in raw            # RFC-4180 line endings survive on disk
        header = raw.split("\r\n")[0]
        assert header.split(",") == list(table.columns)

    def test_empty_rows_gives_header_only_csv(self):
        table = SummaryTable(program="ladder", columns=("a", "b"), rows=[])
        assert table.to_csv() == "a,b\r\n"

    def test_battery_outputs_written(self, tmp_path):
        spec = BatterySpec(program="ladder", levels=("L0",), out=str(tmp_path / "b"),
                           **SMALL)
        run_battery(spec)
        for name in ("summary.json", "summary.csv", "runs.ndjson", "battery.json"):
            assert (tmp_path / "b" / name).exists()
        lines = (tmp_path / "b" / "runs.ndjson").read_text().strip().splitlines()
        assert len(lines) == 2
        json.loads(lines[0])


class TestCalibrate:
    def test_zero_jitter_single_candidate_returns_defaults(self):
        spec = SearchSpec(candidates=1, seeds=(11,), affinity_jitter=0.0,
                          reward_jitter=0.0, wellbeing_jitter=0.0,
                          threshold_jitter=0.0, gamma_range=(0.97, 0.97),
                          alpha_range=(0.8, 0.8))
        report = calibrate(spec)
        best = report["best"]["candidate"]
        assert best["affinity_weights"] == pytest.approx(DEFAULT_WEIGHTS.as_tuple())
        assert best["reward_weights"] == pytest.approx((0.30, 0.20, 0.10, 0.40))
        assert best["linucb_alpha"] == 0.8

    def test_alpha_outside_search_space_rejected(self):
        with pytest.raises(ConfigError):
            SearchSpec(alpha_range=(0.35, 2.0))
        with pytest.raises(ConfigError):
            SearchSpec(gamma_range=(0.5, 0.97))

    def test_feasible_first_ranking(self):
        spec = SearchSpec(candidates=3, seeds=(11,), rng_seed=4)
        report = calibrate(spec)
        ranked_feasible = [r["feasible"] for r in
                           sorted(report["candidates"],
                                  key=lambda r: (not r["feasible"], r["objective"]))]
        # the best candidate is the first under the feasible-first comparator
        assert report["best"] == sorted(
            report["candidates"], key=lambda r: (not r["feasible"], r["objective"]))[0]
        assert report["feasible_count"] == sum(ranked_feasible)

    def test_infeasible_report_names_conditions(self):
        spec = SearchSpec(candidates=2, seeds=(11,), rng_seed=1)
        report = calibrate(spec)
        for cand in report["candidates"]:
            if not cand["feasible"]:
                assert isinstance(cand["violated_conditions"], list)
