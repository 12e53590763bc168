package demo.time;

import java.util.concurrent.TimeUnit;

public class ThreadNap {
    public static void nap(long seconds) throws InterruptedException {
        TimeUnit.SECONDS.sleep(seconds);
    }
}
