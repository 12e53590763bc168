from acme.client import ApiClient

# thin wrapper so callers never touch the SDK directly

def ping(host):
    client = ApiClient(host)
    return ApiClient.healthcheck(host, retries=3)
