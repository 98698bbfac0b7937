from .grid import (Cell, GridMap, MapError, MAP_FORMAT_VERSION, parse_cell,
                   load_map, loads_map, map_digest, save_map, to_dict, from_dict)
from .generate import generate_random_map
from .paths import (ArcSeg, Chain, LineSeg, ObstacleReroute, OffsetPath,
                    PathNetwork, apply_obstacle_reroutes, extract_path_network,
                    sample_path, LANE_OFFSET)

__all__ = [
    "Cell", "GridMap", "MapError", "MAP_FORMAT_VERSION", "parse_cell",
    "load_map", "loads_map", "map_digest", "save_map", "to_dict", "from_dict",
    "generate_random_map",
    "ArcSeg", "Chain", "LineSeg", "ObstacleReroute", "OffsetPath",
    "PathNetwork", "apply_obstacle_reroutes", "extract_path_network",
    "sample_path", "LANE_OFFSET",
]
