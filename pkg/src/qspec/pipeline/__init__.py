from .config import RunConfig, load_config
from .io import export_field, import_field, ingest_csv, log_returns, write_series
from .render import panel_layout, rasterize, render_heatmap
from .returns import MATCH_SELECTOR, ReturnsResult, returns_workflow

__all__ = [
    "RunConfig", "load_config", "export_field", "import_field", "ingest_csv", "log_returns",
    "write_series", "panel_layout", "rasterize", "render_heatmap", "MATCH_SELECTOR",
    "ReturnsResult", "returns_workflow",
]
