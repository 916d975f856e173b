from .models import ImageGray, ImageLab, ImageRGB
from .service import (
    compose_grid,
    lab_to_rgb,
    list_images,
    load_image,
    resize_image,
    rgb_to_gray,
    rgb_to_lab,
    save_image,
)

__all__ = [
    "ImageGray",
    "ImageLab",
    "ImageRGB",
    "compose_grid",
    "lab_to_rgb",
    "list_images",
    "load_image",
    "resize_image",
    "rgb_to_gray",
    "rgb_to_lab",
    "save_image",
]
