package demo.io;

import com.opencsv.CSVReader;
import java.io.IOException;
import java.io.StringReader;

public class CsvSplit {
    public static String[] firstRow(String csv) throws IOException {
        CSVReader reader = new CSVReader(new StringReader(csv));
        return reader.readNext();
    }
}
