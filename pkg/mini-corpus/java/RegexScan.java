package demo.text;

import java.util.regex.Matcher;
import java.util.regex.Pattern;

public class RegexScan {
    public static boolean hasDigits(String text) {
        Pattern digits = Pattern.compile("[0-9]+");
        Matcher m = digits.matcher(text);
        return m.find();
    }
}
