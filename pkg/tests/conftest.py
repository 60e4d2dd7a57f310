import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scorelens.scoring import ModelConfig, ModelRegistry


FIXTURE_PAIRS = [
    (
        "Plants make their own food using energy from the sun. Green leaves "
        "take in light and air, while roots pull water from the soil.",
        "Plants use sunlight and water to make food.",
    ),
    (
        "Water moves through the world in a cycle. Heat from the sun turns "
        "water in lakes and oceans into vapor, which forms clouds and rain.",
        "The sun heats water, which becomes clouds and falls as rain.",
    ),
    (
        "Objects stay at rest or keep moving unless a force acts on them. "
        "A heavier object needs a larger force to change its motion.",
        "Things keep moving unless a force stops them.",
    ),
    (
        "Matter exists in three common states. A solid keeps its shape, a "
        "liquid takes the shape of its container, and a gas fills any space.",
        "Matter can be a solid, a liquid, or a gas.",
    ),
    (
        "Seeds need water, warmth, and soil to grow. First a root pushes "
        "down, then a shoot rises toward the light and grows leaves.",
        "A seed grows a root and a shoot, then leaves.",
    ),
]


@pytest.fixture
def tiny_config():
    return ModelConfig(
        model_id="tiny", kind="reference",
        layers=2, heads=2, embed_dim=8, window=4, max_len=128, seed=7,
    )


@pytest.fixture
def test_scale_config():
    return ModelConfig(
        model_id="content", kind="reference",
        layers=4, heads=4, embed_dim=32, window=8, max_len=512, seed=11,
        score_dimension="content",
    )


@pytest.fixture
def registry(tiny_config, test_scale_config):
    wording = ModelConfig(
        model_id="wording", kind="reference",
        layers=4, heads=4, embed_dim=32, window=8, max_len=512, seed=23,
        score_dimension="wording",
    )
    summary_global = ModelConfig(
        model_id="content-global", kind="reference",
        layers=4, heads=4, embed_dim=32, window=8, max_len=512, seed=11,
        global_mode="summary_global", score_dimension="content",
    )
    return ModelRegistry([tiny_config, test_scale_config, wording, summary_global])


@pytest.fixture
def fixture_pairs():
    return list(FIXTURE_PAIRS)
