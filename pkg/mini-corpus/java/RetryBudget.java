package demo.core;

import com.acme.net.Backoff;

public class RetryBudget {
    public static long nextDelay(int attempt) {
        Backoff planner = new Backoff(250);
        return planner.delayMillis(attempt);
    }
}
