import os

import pytest

import dcb_marl as dm

DATA = os.environ.get("DCB_TEST_DATA", os.path.join(os.path.dirname(__file__), "..", "data"))


@pytest.fixture
def tiny3():
    return dm.Scenario.load(os.path.join(DATA, "tiny3.json"))


def test_tiny3_traffic(tiny3):
    assert tiny3.validate() == []
    model = dm.TrafficModel(tiny3)
    assert model.demand([0, 0, 0]) == [[3, 0]]
    hot = model.hotspots([0, 0, 0])
    assert len(hot) == 1
    assert hot[0]["participants"] == ["f1", "f2", "f3"]
    assert model.congested_durations([0, 0, 0]) == [10, 10, 9]
    assert model.hotspots([0, 0, 10]) == []


def test_rewards_and_schedule(tiny3):
    model = dm.TrafficModel(tiny3)
    assert dm.hotspot_cost(9) == -729.0
    assert dm.global_reward(model, [0, 0, 0]) == -2349.0
    assert dm.epsilon_at(120) == pytest.approx(0.89)
    assert dm.epsilon_at(10800) == 0.0
    assert dm.degree_of_difficulty(1.663, 498, 778) == pytest.approx(1.0645, abs=1e-3)


def test_oracle_and_training(tiny3):
    model = dm.TrafficModel(tiny3)
    assert dm.oracle(model) == [0, 0, 10]
    cfg = dm.LearnerConfig()
    cfg.episodes = 2000
    res = dm.train(model, dm.Method.IRL, cfg)
    again = dm.train(model, dm.Method.IRL, cfg)
    assert res["solution"] == again["solution"]
    assert len(res["hotspot_curve"]) == 2000
    metrics = dm.run_metrics(model, [0, 0, 10])
    assert metrics["regulated_flights"] == 1
    assert metrics["avg_delay"] == pytest.approx(10 / 3)


def test_errors(tiny3):
    with pytest.raises(dm.DcbError):
        dm.Scenario.from_json("{not json")
    with pytest.raises(dm.DcbError):
        dm.run_metrics(dm.TrafficModel(tiny3), [0, 0, 11])
    bad = dm.Scenario.from_json(tiny3.to_json().replace('"entry":50', '"entry":59'))
    assert "degenerate-crossing" in bad.validate()
