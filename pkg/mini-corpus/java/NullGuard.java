package demo.core;

import java.util.Objects;

public class NullGuard {
    public static String require(String value) {
        return Objects.requireNonNull(value, "value");
    }

    public static boolean same(String a, String b) {
        return Objects.equals(a, b);
    }
}
