import pytest
import yaml

from scrollsmith.src.config import RunConfig, load_config


def test_defaults(clean_env):
    config = load_config()
    assert config.primes == (31,)
    assert config.seed == 0
    assert config.output_format == "json"
    assert config.to_dict()["primes"] == [31]

def test_environment_overrides_defaults(clean_env):
    clean_env.setenv("SCROLLSMITH_PRIMES", "31,101")
    clean_env.setenv("SCROLLSMITH_SEED", "7")
    clean_env.setenv("SCROLLSMITH_LOG_LEVEL", "warning")
    config = load_config()
    assert config.primes == (31, 101)
    assert config.seed == 7
    assert config.log_level == "WARNING"

def test_yaml_and_overrides(clean_env, test_data_dir):
    clean_env.setenv("SCROLLSMITH_SEED", "7")
    path = test_data_dir / "run.yaml"
    path.write_text(yaml.safe_dump({"seed": 3, "threads": 2, "retry_budget": 5}))
    config = load_config(path, seed=11, threads=None)
    assert config.seed == 11
    assert config.threads == 2
    assert config.retry_budget == 5

def test_unknown_yaml_keys(clean_env, test_data_dir):
    path = test_data_dir / "bad.yaml"
    path.write_text(yaml.safe_dump({"seeds": 3}))
    with pytest.raises(ValueError):
        load_config(path)
    path.write_text(yaml.safe_dump([1, 2]))
    with pytest.raises(ValueError):
        load_config(path)

def test_invalid_environment_value(clean_env):
    clean_env.setenv("SCROLLSMITH_THREADS", "many")
    with pytest.raises(ValueError):
        load_config()

@pytest.mark.parametrize("kwargs", [
    {"primes": "31,4"},
    {"seed": -1},
    {"retry_budget": 0},
    {"threads": 0},
    {"output_format": "xml"},
    {"log_level": "chatty"},
])
def test_invalid_values(kwargs):
    with pytest.raises(ValueError):
        RunConfig(**kwargs)
