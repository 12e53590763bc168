package demo.ui;

import java.util.ArrayList;
import java.util.Collections;
import java.util.List;

public class MenuTitles {
    public static List<String> getMenuTitles(String[] strArray) {
        List<String> menuList = new ArrayList<String>();
        Collections.addAll(menuList, strArray);
        return menuList;
    }
}
