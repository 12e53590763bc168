from urllib.parse import urlparse, urlencode


def host_of(url):
    return urlparse(url).netloc


def with_query(base, **params):
    return base + "?" + urlencode(params)
