package demo.io;

import java.util.Base64;

public class Base64Copy {
    public static String pack(byte[] raw) {
        return Base64.getEncoder().encodeToString(raw);
    }
}
