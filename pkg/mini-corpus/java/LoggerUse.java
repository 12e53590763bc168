package demo.core;

import org.slf4j.Logger;
import org.slf4j.LoggerFactory;

public class LoggerUse {
    private static final Logger log = LoggerFactory.getLogger(LoggerUse.class);

    public void start(String name) {
        log.info("starting {}", name);
    }
}
