package demo.coll;

import java.util.List;
import java.util.stream.Collectors;

public class StreamSum {
    public static List<String> upper(List<String> names) {
        return names.stream().map(String::toUpperCase).collect(Collectors.toList());
    }
}
