"""Small helpers around dense arrays."""
import numpy as np


def farthest(from_point, to_points):
    distances = np.abs(to_points - from_point)
    index = np.argmax(distances)
    return to_points[index], index


def normalize(values):
    center = np.mean(values)
    return values - center
