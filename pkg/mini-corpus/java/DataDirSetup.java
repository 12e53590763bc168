package demo.boot;

import org.chromium.base.PathUtils;

public class DataDirSetup {
    private static final String SUFFIX = "webview";

    public static void loadLibrary(Object appContext) {
        PathUtils.setPrivateDataDirectorySuffix(SUFFIX, appContext);
    }
}
