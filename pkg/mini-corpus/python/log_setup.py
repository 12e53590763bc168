import logging


def make_logger(name):
    logging.basicConfig(level=logging.INFO)
    logger = logging.getLogger(name)
    logger.info("logger ready")
    return logger
