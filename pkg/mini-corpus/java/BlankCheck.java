package demo.text;

import org.apache.commons.lang3.StringUtils;

public class BlankCheck {
    public static boolean usable(String value) {
        if (StringUtils.isBlank(value)) {
            return false;
        }
        return !StringUtils.containsWhitespace(value);
    }
}
