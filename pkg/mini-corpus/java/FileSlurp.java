package demo.io;

import java.io.IOException;
import java.nio.file.Files;
import java.nio.file.Path;
import java.nio.file.Paths;

public class FileSlurp {
    public static String slurp(String name) throws IOException {
        Path p = Paths.get(name);
        return Files.readString(p);
    }
}
