from .service import BinaryMask, darkest_mask, dcp_map, mask_size, masked_overlay

__all__ = ["BinaryMask", "darkest_mask", "dcp_map", "mask_size", "masked_overlay"]
