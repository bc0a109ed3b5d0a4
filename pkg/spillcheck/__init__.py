"""spillcheck: direct and spillover effects of interventions on epidemic spread."""

from __future__ import annotations

from importlib.metadata import PackageNotFoundError, version

__version__ = "0.1.0"


def package_versions() -> dict[str, str]:
    """Versions recorded in run manifests."""
    versions = {"spillcheck": __version__}
    for package in ("numpy", "scipy", "pandas"):
        try:
            versions[package] = version(package)
        except PackageNotFoundError:
            versions[package] = "unknown"
    return versions
