import logging
from typing import Any, Dict

# Import configuration
from .config import get_config

# Import repositories
from .repositories.material_repository import MaterialRepository
from .repositories.table_repository import TableRepository

# Import service factory functions
from .services.force_service import create_force_service
from .services.sweep_service import create_sweep_service

__version__ = "0.1.0"

logger = logging.getLogger(__name__)


def create_services(config_class=None, table_stream=None) -> Dict[str, Any]:
    """
    Service factory function.
    Wires repositories and services together for one CLI invocation.

    Args:
        config_class: config class to use; chosen from CCTHRUST_ENV when None
        table_stream: text stream used for stdout tables (tests pass a buffer)

    Returns:
        Dictionary with the config class, repositories and services
    """
    # 1. Determine configuration
    if config_class is None:
        config_class = get_config()
    else:
        config_class.validate()
    logger.debug("🔧 Configuration loaded: %s", config_class.__name__)

    # 2. Base repositories
    services: Dict[str, Any] = {
        "config": config_class,
        "material_repository": MaterialRepository(),
        "table_repository": TableRepository(stream=table_stream),
    }

    # 3. High-level services, each pulling its dependencies from the registry
    services["force_service"] = create_force_service(services, config_class)
    services["sweep_service"] = create_sweep_service(services, workers=config_class.WORKERS)

    logger.debug("✅ Services initialized: %s", list(services.keys()))
    return services


# Exported interface
__all__ = ["create_services", "__version__"]
