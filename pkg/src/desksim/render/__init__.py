from .camera import (CameraIntrinsics, CameraPose, augmented_camera_pose,
                     car_forward_camera, project_points, uav_gimbal_camera,
                     UAV_CAMERA_PITCH, CAR_CAMERA_HEIGHT)
from .raster import BBox, Frame, Renderer, gt_bbox, NEAR_PLANE
from .scene import (Scene, build_static_scene, car_scene, CAR_ID,
                    OBSTACLE_ID_BASE, SCENERY_ID_BASE)
from .ppm import read_ppm, write_ppm

__all__ = [
    "CameraIntrinsics", "CameraPose", "augmented_camera_pose",
    "car_forward_camera", "project_points", "uav_gimbal_camera",
    "UAV_CAMERA_PITCH", "CAR_CAMERA_HEIGHT",
    "BBox", "Frame", "Renderer", "gt_bbox", "NEAR_PLANE",
    "Scene", "build_static_scene", "car_scene", "CAR_ID",
    "OBSTACLE_ID_BASE", "SCENERY_ID_BASE",
    "read_ppm", "write_ppm",
]
