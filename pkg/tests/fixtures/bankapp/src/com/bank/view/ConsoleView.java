package com.bank.view;

import java.util.ArrayList;
import java.util.List;

import com.bank.model.Account;

public class ConsoleView {
    private static final String BANNER = "== Bank ==";

    public static void main(String[] args) {
        printBanner();
        for (String line : WidgetCls.defaults()) {
            System.out.println(line);
        }
    }

    public static void printBanner() {
        System.out.println(BANNER);
    }

    public void printBalance(Account account) {
        String label = "Balance";
        double value = account.getBalance();
        if (value < 0) {
            label = "Overdrawn";
        }
        System.out.println(label + ": " + value);
    }

    static class WidgetCls {
        static List<String> defaults() {
            return new ArrayList<String>();
        }
    }

    private static class Row {
        String left;
        String right;

        Row(String left, String right) {
            this.left = left;
            this.right = right;
        }

        String render() {
            return left + " | " + right;
        }
    }
}
