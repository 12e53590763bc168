package demo.coll;

import java.util.Arrays;
import java.util.List;

public class ArraysDemo {
    public static List<Integer> ordered(Integer[] values) {
        Arrays.sort(values);
        return Arrays.asList(values);
    }
}
