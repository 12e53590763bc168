import requests


def fetch_data(url):
    response = requests.get(url)
    return response.json()


def push_data(url, payload):
    # the API expects JSON bodies
    response = requests.post(url, json=payload, timeout=5)
    response.raise_for_status()
    return response.status_code
