import pytest

from model_server import Generator, ServerConfig


class TestServerConfig:
    def test_defaults(self):
        config = ServerConfig(model="some/path")
        assert config.device == "cpu"
        assert config.max_new_tokens_cap == 256
        assert config.sample is False

    def test_zero_cap_rejected(self):
        with pytest.raises(ValueError, match="at least 1"):
            ServerConfig(model="m", max_new_tokens_cap=0)

    def test_negative_cap_rejected(self):
        with pytest.raises(ValueError):
            ServerConfig(model="m", max_new_tokens_cap=-5)

    def test_port_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="port"):
            ServerConfig(model="m", port=70000)

    def test_ephemeral_port_allowed(self):
        assert ServerConfig(model="m", port=0).port == 0


class TestModelLoading:
    def test_missing_checkpoint_is_startup_error(self, tmp_path):
        config = ServerConfig(model=str(tmp_path / "does-not-exist"))
        with pytest.raises(RuntimeError, match="cannot load model"):
            Generator(config)
