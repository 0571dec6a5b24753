import sys
from pathlib import Path

import pytest

# Get the absolute path to the repository root
HOME_DIR = Path(__file__).parent.parent.absolute()

# Make the raagspine package importable without installing it
sys.path.insert(0, str(HOME_DIR))

print(f"Set up test paths. HOME_DIR = {HOME_DIR}")
print(f"raagspine package path = {HOME_DIR / 'raagspine'}")


@pytest.fixture(autouse=True)
def default_config():
    """Every test starts from the packaged configuration."""
    from raagspine.config import set_config

    set_config(None)
    yield
    set_config(None)
