package demo.test;

import static org.junit.Assert.assertEquals;
import static org.junit.Assert.assertTrue;

public class AssertDemo {
    public void checkTotals(int expected, int actual) {
        assertEquals(expected, actual);
        assertTrue(actual >= 0);
    }
}
