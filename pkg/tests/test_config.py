import logging

import pytest

from bergmankit import config


def test_configure_sentry_if_dsn_present(caplog, monkeypatch, mocker):
    mocked_init = mocker.patch("bergmankit.config.sentry_sdk.init")
    monkeypatch.setenv("SENTRY_DSN", "https://1234567890@00000.ingest.sentry.io/123456")
    caplog.set_level(logging.INFO)
    assert config.configure_sentry() == "test"
    mocked_init.assert_called_once()
    assert (
        "Sentry DSN found, exceptions will be sent to Sentry with env=test" in caplog.text
    )


def test_configure_sentry_doesnt_configure_if_dsn_not_present(caplog, monkeypatch):
    monkeypatch.delenv("SENTRY_DSN", raising=False)
    caplog.set_level(logging.INFO)
    assert config.configure_sentry() is None
    assert "No Sentry DSN found, exceptions will not be sent to Sentry" in caplog.text


def test_defaults_without_env():
    assert config.size_cap() == config.DEFAULT_SIZE_CAP
    assert config.default_samples() == config.DEFAULT_SAMPLES
    assert config.default_seed() == config.DEFAULT_SEED


def test_env_overrides_defaults(monkeypatch):
    monkeypatch.setenv("BERGMANKIT_SIZE_CAP", "500")
    monkeypatch.setenv("BERGMANKIT_SEED", "9")
    assert config.size_cap() == 500
    assert config.default_seed() == 9


def test_non_integer_env_raises_error(monkeypatch):
    monkeypatch.setenv("BERGMANKIT_SAMPLES", "many")
    with pytest.raises(ValueError, match="must be an integer") as e:
        config.default_samples()
    assert "Env variable BERGMANKIT_SAMPLES must be an integer, got 'many'" in str(e)
