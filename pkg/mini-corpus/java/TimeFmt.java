package demo.time;

import java.time.LocalDate;
import java.time.format.DateTimeFormatter;

public class TimeFmt {
    public static String today() {
        DateTimeFormatter fmt = DateTimeFormatter.ofPattern("yyyy-MM-dd");
        return LocalDate.now().format(fmt);
    }
}
