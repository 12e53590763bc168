package demo.text;

import org.apache.commons.lang3.StringUtils;

public class StringPad {
    public static String fixedWidth(String cell) {
        String trimmed = StringUtils.trimToEmpty(cell);
        return StringUtils.rightPad(trimmed, 12);
    }
}
