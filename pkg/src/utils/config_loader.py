"""
Configuration Loader
Centralized configuration loading for the Subharmonic Bounds Verifier.
Handles loading from config/ directory and provides validation.
"""

import copy
import yaml
from pathlib import Path
from typing import Dict, Any, Optional


def get_project_root() -> Path:
    """Get the project root directory (parent of src/)."""
    return Path(__file__).parent.parent.parent


def load_config(config_path: Optional[str] = None, validate: bool = True) -> Dict[str, Any]:
    """
    Load configuration from YAML file with validation.

    Args:
        config_path: Optional path to config file. If None, uses config/config.yaml
        validate: Whether to validate config structure (default: True)

    Returns:
        Configuration dictionary

    Raises:
        FileNotFoundError: If config file doesn't exist
        yaml.YAMLError: If config file is invalid
        ValueError: If required sections are missing or values out of range
    """
    if config_path is None:
        config_path = get_project_root() / "config" / "config.yaml"
    else:
        config_path = Path(config_path)

    if not config_path.exists():
        raise FileNotFoundError(
            f"Configuration file not found: {config_path}\n"
            f"Expected location: {get_project_root() / 'config' / 'config.yaml'}\n"
            f"Make sure config/config.yaml exists in the project root."
        )

    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            config = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise yaml.YAMLError(
            f"Invalid YAML in config file: {config_path}\n"
            f"Error: {e}"
        )

    if not isinstance(config, dict):
        raise ValueError(
            f"Config file must contain a YAML dictionary, got {type(config).__name__}"
        )

    if validate:
        _validate_config(config, config_path)

    return config


def _validate_config(config: Dict[str, Any], config_path: Path):
    """
    Validate configuration structure and provide helpful error messages.

    Args:
        config: Configuration dictionary to validate
        config_path: Path to config file (for error messages)

    Raises:
        ValueError: If validation fails with detailed error message
    """
    required_sections = {
        'geometry': 'Boundary tolerances and SDF sampling',
        'harnack': 'Chain-graph and oracle settings',
        'green': 'Harmonic measure and walk-on-spheres settings',
        'hausdorff': 'Cover radius floor and dyadic levels',
        'engine': 'Seeds, tolerances and r_x policy',
        'paths': 'Output locations',
        'logging': 'Log level and optional log file'
    }

    missing_sections = [name for name in required_sections if name not in config]
    if missing_sections:
        error_msg = "Configuration file is missing required sections:\n"
        for section in missing_sections:
            error_msg += f"  - {section}: {required_sections[section]}\n"
        error_msg += f"\nConfig file: {config_path}\n"
        error_msg += "Please ensure your config.yaml includes all required sections."
        raise ValueError(error_msg)

    required_keys = {
        'geometry': ['eps_geo_analytic', 'eps_geo_sdf', 'projection_max_iter'],
        'harnack': ['eps_chain', 'mesh', 'max_edge_length', 'n_boundary', 'n_sphere'],
        'green': ['samples', 'eps_shell_factor', 'max_steps', 'confidence_sigma'],
        'hausdorff': ['r_min', 'finest_level', 'guard_grid'],
        'engine': ['seed', 'tol_closed_form', 'r_x_fractions'],
        'paths': ['output_dir', 'reports_dir'],
    }
    for section, keys in required_keys.items():
        missing = [k for k in keys if k not in config[section]]
        if missing:
            raise ValueError(
                f"{section} section is missing required keys: {missing}\n"
                f"Required: {keys}"
            )

    positive = [
        ('geometry', 'eps_geo_analytic'), ('geometry', 'eps_geo_sdf'),
        ('harnack', 'mesh'), ('harnack', 'max_edge_length'),
        ('green', 'eps_shell_factor'), ('green', 'confidence_sigma'),
        ('hausdorff', 'r_min'), ('engine', 'tol_closed_form'),
    ]
    for section, key in positive:
        value = config[section][key]
        if not isinstance(value, (int, float)) or value <= 0:
            raise ValueError(f"{section}.{key} must be a positive number, got {value!r}")

    eps_chain = config['harnack']['eps_chain']
    if not (0.0 < eps_chain < 1.0):
        raise ValueError(f"harnack.eps_chain must be between 0 and 1, got {eps_chain}")

    for section, key in [('green', 'samples'), ('green', 'max_steps'),
                         ('harnack', 'n_boundary'), ('harnack', 'n_sphere')]:
        if int(config[section][key]) < 1:
            raise ValueError(f"{section}.{key} must be at least 1, got {config[section][key]}")

    fractions = config['engine']['r_x_fractions']
    if not fractions or any(not (0.0 < f <= 1.0) for f in fractions):
        raise ValueError(
            f"engine.r_x_fractions must be a non-empty list in (0, 1], got {fractions}"
        )


def get_default_config() -> Dict[str, Any]:
    """
    Get default configuration.

    Mirrors config/config.yaml so library code and tests run without the file.

    Returns:
        Default configuration dictionary
    """
    return {
        'geometry': {
            'eps_geo_analytic': 1e-9,
            'eps_geo_sdf': 1e-6,
            'projection_max_iter': 100,
            'diameter_samples': 2000,
            'gap_samples': 2000,
            'cover_cells': 20000,
        },
        'harnack': {
            'eps_chain': 1e-6,
            'mesh': 0.1,
            'max_edge_length': 0.35,
            'n_boundary': 48,
            'n_sphere': 48,
            'oracle_samples': 4096,
        },
        'green': {
            'samples': 4096,
            'eps_shell_factor': 1e-4,
            'max_steps': 10000,
            'batch_size': 4096,
            'workers': 1,
            'confidence_sigma': 3.0,
        },
        'hausdorff': {
            'r_min': 1e-12,
            'finest_level': 40,
            'guard_grid': 64,
        },
        'engine': {
            'seed': 20240917,
            'tol_closed_form': 1e-9,
            'pj_tolerance': 1e-3,
            'r_x_fractions': [1.0, 0.5, 0.125],
            'boundary_samples': 256,
            'substitute_sup': False,
            'workers': 1,
        },
        'paths': {
            'output_dir': 'output',
            'reports_dir': 'output/reports',
            'scenarios_dir': 'config/scenarios',
        },
        'logging': {
            'level': 'INFO',
            'log_file': None,
        },
    }


def apply_overrides(
    config: Dict[str, Any],
    seed: Optional[int] = None,
    samples: Optional[int] = None,
    mesh: Optional[float] = None,
    shell: Optional[float] = None
) -> Dict[str, Any]:
    """
    Fold command-line estimator flags into a copy of the configuration.

    Args:
        config: Loaded configuration
        seed: Corpus seed (engine.seed)
        samples: Quadrature nodes / walks (green.samples)
        mesh: Chain-graph spacing (harnack.mesh)
        shell: Walk-on-spheres shell factor (green.eps_shell_factor)

    Returns:
        New configuration dictionary
    """
    merged = copy.deepcopy(config)
    if seed is not None:
        merged['engine']['seed'] = int(seed)
    if samples is not None:
        if samples < 1:
            raise ValueError(f"--samples must be at least 1, got {samples}")
        merged['green']['samples'] = int(samples)
    if mesh is not None:
        if mesh <= 0:
            raise ValueError(f"--mesh must be positive, got {mesh}")
        merged['harnack']['mesh'] = float(mesh)
    if shell is not None:
        if shell <= 0:
            raise ValueError(f"--shell must be positive, got {shell}")
        merged['green']['eps_shell_factor'] = float(shell)
    return merged


def resolve_output_paths(config: Dict[str, Any]) -> Dict[str, Path]:
    """
    Resolve all output paths relative to project root.

    Args:
        config: Configuration dictionary

    Returns:
        Dictionary mapping path names to absolute Path objects
    """
    root = get_project_root()
    paths_config = config.get('paths', {})

    resolved = {}
    for key, value in paths_config.items():
        resolved[key] = root / value

    return resolved


def ensure_output_dirs(config: Dict[str, Any]):
    """
    Create output directories if they don't exist.

    Args:
        config: Configuration dictionary
    """
    paths = resolve_output_paths(config)

    for key in ('output_dir', 'reports_dir'):
        dir_path = paths.get(key)
        if dir_path:
            dir_path.mkdir(parents=True, exist_ok=True)
