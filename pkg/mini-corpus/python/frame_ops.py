import pandas as pd


def load_sales(path):
    frame = pd.read_csv(path, parse_dates=["day"])
    return frame


def totals_by_region(frame):
    grouped = frame.groupby("region")
    return grouped["amount"].sum()
